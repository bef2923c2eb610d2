use num_complex::Complex64;

use super::FormBoundReport;
use crate::discrete::{dot, DirichletSpace, DiscreteOperator};
use crate::eigen::{largest, EigenOptions};
use crate::error::Result;
use crate::reduction::CoefficientSet;

/// Best `C` in `|<L u, v>| <= C ||grad u|| ||grad v||` over the discrete
/// Dirichlet space. With `mass_term` the norms are `(||grad u||^2 + ||u||^2)^1/2`.
pub fn form_bound_constant(cs: &CoefficientSet, mass_term: bool) -> Result<FormBoundReport> {
    form_bound_constant_with(cs, mass_term, &EigenOptions::default())
}

pub fn form_bound_constant_with(
    cs: &CoefficientSet,
    mass_term: bool,
    opts: &EigenOptions,
) -> Result<FormBoundReport> {
    let space = DirichletSpace::new(cs.grid())?;
    let op = DiscreteOperator::from_coefficients(&space, cs)?;
    let adj = op.adjoint();
    let mass = if mass_term { 1.0 } else { 0.0 };
    let vol = space.cell_volume();
    let norm_op = |x: &[Complex64]| -> Vec<Complex64> {
        let mut y = space.laplacian(x);
        if mass_term {
            for (o, v) in y.iter_mut().zip(x) {
                *o += v * vol;
            }
        }
        y
    };
    let a = |x: &[Complex64]| adj.apply(&space.solve(&op.apply(x), mass));
    let t = |x: &[Complex64]| space.solve(x, mass);
    let pair = largest(&a, &norm_op, &t, space.len(), opts)?;
    let constant = pair.value.max(0.0).sqrt();
    let u = pair.vector;
    let mut v = space.solve(&op.apply(&u), mass);
    let vn = dot(&v, &norm_op(&v)).re.sqrt();
    if vn > 0.0 {
        v.iter_mut().for_each(|x| *x /= vn);
    }
    Ok(FormBoundReport {
        constant,
        iterations: pair.iterations,
        residual: pair.residual,
        mass_term,
        antisymmetry_defect: None,
        refinement_trace: vec![(cs.grid().points_per_axis(), constant)],
        witness_u: Some(space.embed(&u)),
        witness_v: Some(space.embed(&v)),
    })
}
