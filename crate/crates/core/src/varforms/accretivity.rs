use num_complex::Complex64;
use serde::Serialize;

use super::{AccretivityReport, Verdict};
use crate::discrete::{DirichletSpace, DiscreteOperator, PotentialMatrix};
use crate::eigen::{largest, smallest, EigenOptions};
use crate::error::{Error, Result};
use crate::field::{Grid, MatrixField, ScalarField};
use crate::reduction::{ellipticity_range, most_negative_direction, reduce_symbols, CoefficientSet, PointMass};

/// Tolerance on negative pointwise eigenvalues of `P`, relative to its largest.
const ELLIPTIC_TOL: f64 = 1e-10;

/// Grid point and unit vector `xi` with `P xi . xi = eigenvalue < 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Direction {
    pub index: Vec<usize>,
    pub eigenvalue: f64,
    pub xi: Vec<f64>,
}

pub fn accretivity_min(cs: &CoefficientSet) -> Result<AccretivityReport> {
    accretivity_min_with(cs, &EigenOptions::default())
}

/// Smallest value of `Re<-L u, u> / ||grad u||^2` on the discrete Dirichlet space.
pub fn accretivity_min_with(cs: &CoefficientSet, opts: &EigenOptions) -> Result<AccretivityReport> {
    let red = reduce_symbols(cs)?;
    if let Some(report) = negative_principal(&red.p, red.ellipticity_lower, red.ellipticity_upper) {
        return Ok(report);
    }
    let space = DirichletSpace::new(cs.grid())?;
    let op = DiscreteOperator::from_coefficients(&space, cs)?;
    let adj = op.adjoint();
    let h = |x: &[Complex64]| -> Vec<Complex64> {
        op.apply(x)
            .iter()
            .zip(adj.apply(x))
            .map(|(a, b)| -(a + b) * 0.5)
            .collect()
    };
    let k = |x: &[Complex64]| space.laplacian(x);
    let t = |x: &[Complex64]| space.solve(x, 0.0);
    let pair = smallest(&h, &k, &t, space.len(), opts)?;
    let (upper, lower) = symbol_bounds(&space, &red.p, red.ellipticity_lower, red.ellipticity_upper, &red.sigma, &red.sigma_atoms, opts)?;
    Ok(AccretivityReport {
        min_rayleigh: pair.value,
        verdict: Verdict::from_minimum(pair.value),
        upper_eps: upper,
        lower_k: lower,
        direction: None,
        iterations: pair.iterations,
        residual: pair.residual,
        refinement_trace: vec![(cs.grid().points_per_axis(), pair.value)],
        witness_u: Some(space.embed(&pair.vector)),
    })
}

pub fn schrodinger_positivity(p: &MatrixField, sigma: &ScalarField, atoms: &[PointMass]) -> Result<AccretivityReport> {
    schrodinger_positivity_with(p, sigma, atoms, &EigenOptions::default())
}

/// Smallest value of `(<P grad h, grad h> - <sigma h, h>) / ||grad h||^2`
/// over real `h` in the discrete Dirichlet space.
pub fn schrodinger_positivity_with(
    p: &MatrixField,
    sigma: &ScalarField,
    atoms: &[PointMass],
    opts: &EigenOptions,
) -> Result<AccretivityReport> {
    p.grid().check_same(sigma.grid())?;
    let p = p.re();
    let defect = p.symmetry_defect();
    if defect > 1e-12 * p.max_norm().max(1.0) {
        return Err(Error::NotSymmetric(defect));
    }
    let (lo, hi) = ellipticity_range(&p);
    if let Some(report) = negative_principal(&p, lo, hi) {
        return Ok(report);
    }
    let sigma = sigma.re();
    let space = DirichletSpace::new(p.grid())?;
    let kp = principal_form(&space, &p)?;
    let pot = real_potential(&space, &sigma, atoms)?;
    let a = |x: &[Complex64]| -> Vec<Complex64> {
        kp.apply(x)
            .iter()
            .zip(pot.apply(x))
            .map(|(k, s)| -k - s)
            .collect()
    };
    let k = |x: &[Complex64]| space.laplacian(x);
    let t = |x: &[Complex64]| space.solve(x, 0.0);
    let pair = smallest(&a, &k, &t, space.len(), &opts.real())?;
    let (upper, lower) = symbol_bounds(&space, &p, lo, hi, &sigma, atoms, opts)?;
    Ok(AccretivityReport {
        min_rayleigh: pair.value,
        verdict: Verdict::from_minimum(pair.value),
        upper_eps: upper,
        lower_k: lower,
        direction: None,
        iterations: pair.iterations,
        residual: pair.residual,
        refinement_trace: vec![(p.grid().points_per_axis(), pair.value)],
        witness_u: Some(space.embed(&pair.vector)),
    })
}

/// Operator whose `apply` is `-K_P`.
pub(crate) fn principal_form(space: &DirichletSpace, p: &MatrixField) -> Result<DiscreteOperator> {
    DiscreteOperator::zero(space).with_principal(p)
}

pub(crate) fn real_potential(space: &DirichletSpace, sigma: &ScalarField, atoms: &[PointMass]) -> Result<PotentialMatrix> {
    let real_atoms: Vec<PointMass> = atoms
        .iter()
        .map(|a| PointMass {
            location: a.location,
            weight: Complex64::new(a.weight.re, 0.0),
        })
        .collect();
    Ok(space.potential(&sigma.re(), &real_atoms)?.hermitian_part())
}

fn negative_principal(p: &MatrixField, lo: f64, hi: f64) -> Option<AccretivityReport> {
    if lo >= -ELLIPTIC_TOL * hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE) {
        return None;
    }
    let (l, eigenvalue, xi) = most_negative_direction(p);
    let grid: &Grid = p.grid();
    Some(AccretivityReport {
        min_rayleigh: f64::NEG_INFINITY,
        verdict: Verdict::Not,
        upper_eps: None,
        lower_k: None,
        direction: Some(Direction {
            index: grid.multi(l)[..grid.dim()].to_vec(),
            eigenvalue,
            xi,
        }),
        iterations: 0,
        residual: 0.0,
        refinement_trace: vec![(grid.points_per_axis(), f64::NEG_INFINITY)],
        witness_u: None,
    })
}

/// Extremes of `<sigma h, h> / <P grad h, grad h>`, when `P` is positive.
fn symbol_bounds(
    space: &DirichletSpace,
    p: &MatrixField,
    lo: f64,
    hi: f64,
    sigma: &ScalarField,
    atoms: &[PointMass],
    opts: &EigenOptions,
) -> Result<(Option<f64>, Option<f64>)> {
    if lo <= ELLIPTIC_TOL * hi.abs() || lo <= 0.0 {
        return Ok((None, None));
    }
    let pot = real_potential(space, sigma, atoms)?;
    if pot.diag.iter().all(|v| v.re == 0.0) {
        return Ok((Some(0.0), Some(0.0)));
    }
    let kp = principal_form(space, p)?;
    let kpos = |x: &[Complex64]| -> Vec<Complex64> { kp.apply(x).into_iter().map(|v| -v).collect() };
    let s = |x: &[Complex64]| pot.apply(x);
    let t = |x: &[Complex64]| space.solve(x, 0.0);
    // A sign-definite sigma makes one of the extremes zero, approached only
    // by the highest discrete frequencies.
    let up = if pot.diag.iter().any(|v| v.re > 0.0) {
        largest(&s, &kpos, &t, space.len(), &opts.real())?.value
    } else {
        0.0
    };
    let down = if pot.diag.iter().any(|v| v.re < 0.0) {
        smallest(&s, &kpos, &t, space.len(), &opts.real())?.value
    } else {
        0.0
    };
    Ok((Some(up), Some((-down).max(0.0))))
}
