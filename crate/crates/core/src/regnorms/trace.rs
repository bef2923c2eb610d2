use num_complex::Complex64;

use super::{NormKind, NormReport, Witness};
use crate::discrete::DirichletSpace;
use crate::eigen::{largest, EigenOptions};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::reduction::PointMass;

/// Least `C` with `int |u|^2 dmu <= C^2 ||grad u||^2` over the discrete
/// Dirichlet space of the inner sub-box.
pub fn trace_norm(mu: &ScalarField, atoms: &[PointMass]) -> Result<NormReport> {
    trace_norm_with(mu, atoms, &EigenOptions::default())
}

pub fn trace_norm_with(mu: &ScalarField, atoms: &[PointMass], opts: &EigenOptions) -> Result<NormReport> {
    let grid = *mu.grid();
    let density = mu.re();
    let peak = density.max_norm().max(atoms.iter().map(|a| a.weight.re.abs()).fold(0.0, f64::max));
    let min = density.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    if min < -1e-12 * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::NegativeDensity { min });
    }
    if let Some(a) = atoms.iter().find(|a| a.weight.re < 0.0) {
        return Err(Error::NegativeDensity { min: a.weight.re });
    }
    let atoms: Vec<PointMass> = atoms
        .iter()
        .map(|a| PointMass {
            location: a.location,
            weight: Complex64::new(a.weight.re, 0.0),
        })
        .collect();
    let space = DirichletSpace::new(&grid)?;
    let pot = space.potential(&density.map(|v| Complex64::new(v.re.max(0.0), 0.0)), &atoms)?;
    if pot.diag.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return Ok(NormReport::new(&grid, NormKind::Trace, 0.0, Witness::None));
    }
    let a = |x: &[Complex64]| pot.apply(x);
    let b = |x: &[Complex64]| space.laplacian(x);
    let t = |x: &[Complex64]| space.solve(x, 0.0);
    let pair = largest(&a, &b, &t, space.len(), &opts.real())?;
    let mut report = NormReport::new(
        &grid,
        NormKind::Trace,
        pair.value.max(0.0).sqrt(),
        Witness::Eigenvector {
            seed: opts.seed,
            iterations: pair.iterations,
            residual: pair.residual,
        },
    );
    report.witness_field = Some(space.embed(&pair.vector));
    Ok(report)
}
