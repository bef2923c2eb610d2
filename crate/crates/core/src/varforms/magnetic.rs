use num_complex::Complex64;
use serde::Serialize;

use super::{form_bound_constant_with, DEFAULT_WINDOW};
use crate::eigen::EigenOptions;
use crate::error::Result;
use crate::field::{div, grad, upsample, MatrixField, ScalarField, VectorField};
use crate::reduction::{CoefficientSet, FormTag};

/// Coefficients of the magnetic form `<(i grad + a) u, (i grad + a) v> + <q u, v>`
/// for real `a`: `A = -I`, `b = 2i a`, `c = i div a + |a|^2 + q`.
pub fn magnetic_coefficients(a: &VectorField, q: &ScalarField) -> Result<CoefficientSet> {
    let grid = *a.grid();
    grid.check_same(q.grid())?;
    let a = a.re();
    let c = div(&a)
        .scale(Complex64::new(0.0, 1.0))
        .add(&a.norm_sqr())?
        .add(q)?;
    CoefficientSet::new(
        MatrixField::scalar_multiple(grid, Complex64::new(-1.0, 0.0)),
        a.scale(Complex64::new(0.0, 2.0)),
        c,
        FormTag::Divergence,
    )
}

/// `<(i grad + a) u, (i grad + a) v> + <q u, v>` by exact quadrature of the
/// trigonometric interpolants. Uses the real part of `a`.
pub fn magnetic_form(a: &VectorField, q: &ScalarField, u: &ScalarField, v: &ScalarField) -> Result<Complex64> {
    let grid = *a.grid();
    for g in [q.grid(), u.grid(), v.grid()] {
        grid.check_same(g)?;
    }
    let a = a.re();
    let (gu, gv) = (grad(u), grad(v));
    let fu = upsample(u, 2)?;
    let fv = upsample(v, 2)?;
    let fq = upsample(q, 2)?;
    let vol = fu.grid().cell_volume();
    let i = Complex64::new(0.0, 1.0);
    let mut total = Complex64::new(0.0, 0.0);
    for axis in 0..grid.dim() {
        let fa = upsample(a.component(axis), 2)?;
        let du = upsample(gu.component(axis), 2)?;
        let dv = upsample(gv.component(axis), 2)?;
        for l in 0..fu.values().len() {
            let left = i * du.values()[l] + fa.values()[l] * fu.values()[l];
            let right = i * dv.values()[l] + fa.values()[l] * fv.values()[l];
            total += left * right.conj();
        }
    }
    for l in 0..fu.values().len() {
        total += fq.values()[l] * fu.values()[l] * fv.values()[l].conj();
    }
    Ok(total * vol)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparabilityReport {
    /// Form bound of the magnetic form.
    pub magnetic: f64,
    /// Form bound of the potential `q + |a|^2`.
    pub potential_part: f64,
    /// Form bound of the drift `a . grad`.
    pub drift_part: f64,
    pub ratio: f64,
    pub window: f64,
    pub within_window: bool,
    pub mass_term: bool,
}

/// Ratio of the magnetic form bound to the larger of the bounds of
/// `q + |a|^2` and `a . grad`.
pub fn magnetic_comparability(
    a: &VectorField,
    q: &ScalarField,
    mass_term: bool,
    window: Option<f64>,
    opts: &EigenOptions,
) -> Result<ComparabilityReport> {
    let window = window.unwrap_or(DEFAULT_WINDOW);
    let a = a.re();
    let magnetic = form_bound_constant_with(&magnetic_coefficients(&a, q)?, mass_term, opts)?.constant;
    let potential_part =
        form_bound_constant_with(&CoefficientSet::potential(q.add(&a.norm_sqr())?), mass_term, opts)?.constant;
    let drift_part = form_bound_constant_with(&CoefficientSet::drift(a.clone()), mass_term, opts)?.constant;
    let reference = potential_part.max(drift_part);
    let ratio = if reference > 0.0 {
        magnetic / reference
    } else {
        f64::INFINITY
    };
    Ok(ComparabilityReport {
        magnetic,
        potential_part,
        drift_part,
        ratio,
        window,
        within_window: ratio >= 1.0 / window && ratio <= window,
        mass_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_test_function, random_band_limited, Grid};
    use crate::reduction::sesquilinear;

    #[test]
    fn zero_potential_is_dirichlet_form_plus_q() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let u = make_test_function(&g, 1, 3).unwrap();
        let v = make_test_function(&g, 2, 3).unwrap();
        let q = random_band_limited(&g, 3, 2, false).unwrap();
        let m = magnetic_form(&VectorField::zeros(g), &q, &u, &v).unwrap();
        let expected = sesquilinear(&CoefficientSet::laplacian(g), &u, &v).unwrap() * -1.0
            + sesquilinear(&CoefficientSet::potential(q), &u, &v).unwrap();
        assert!((m - expected).norm() < 1e-10 * m.norm());
    }

    #[test]
    fn constant_potential_expands_the_square() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let a0 = [Complex64::new(0.7, 0.0), Complex64::new(-1.3, 0.0)];
        let a = VectorField::constant(g, &a0).unwrap();
        let u = make_test_function(&g, 4, 3).unwrap();
        let m = magnetic_form(&a, &ScalarField::zeros(g), &u, &u).unwrap();
        let gu = grad(&u);
        let grad2 = gu.l2_norm().powi(2);
        let a2 = a0.iter().map(|x| x.norm_sqr()).sum::<f64>() * u.l2_norm().powi(2);
        let adot = gu.component(0).scale(a0[0]).add(&gu.component(1).scale(a0[1])).unwrap();
        let cross = 2.0 * (Complex64::new(0.0, 1.0) * adot.inner(&u).unwrap()).re;
        let expected = grad2 + a2 + cross;
        assert!((m.re - expected).abs() < 1e-10 * expected.abs() && m.im.abs() < 1e-10 * expected.abs());
    }

    #[test]
    fn coefficient_representation_matches_the_form() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let a = VectorField::new(vec![
            random_band_limited(&g, 5, 3, true).unwrap(),
            random_band_limited(&g, 6, 3, true).unwrap(),
        ])
        .unwrap();
        let q = random_band_limited(&g, 7, 3, false).unwrap();
        let cs = magnetic_coefficients(&a, &q).unwrap();
        let u = make_test_function(&g, 8, 3).unwrap();
        let v = make_test_function(&g, 9, 3).unwrap();
        let lhs = magnetic_form(&a, &q, &u, &v).unwrap();
        let rhs = sesquilinear(&cs, &u, &v).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm(), "{lhs} {rhs}");
    }
}
