use num_complex::Complex64;

use super::FormBoundReport;
use crate::discrete::{dot, CommutatorOperator, DirichletSpace};
use crate::eigen::{largest, EigenOptions};
use crate::error::Result;
use crate::field::VectorField;

/// Best `C` in `|int d . (u grad v - v grad u)| <= C ||grad u|| ||grad v||`
/// over real `u, v` in the discrete Dirichlet space. Uses the real part of `d`.
pub fn commutator_constant(d: &VectorField) -> Result<FormBoundReport> {
    commutator_constant_with(d, &EigenOptions::default())
}

pub fn commutator_constant_with(d: &VectorField, opts: &EigenOptions) -> Result<FormBoundReport> {
    let space = DirichletSpace::new(d.grid())?;
    let c = CommutatorOperator::new(&space, d)?;
    let a = |x: &[Complex64]| -> Vec<Complex64> {
        space.solve(&c.apply(x), 0.0).iter().map(|v| -v).collect::<Vec<_>>()
    };
    let a = |x: &[Complex64]| c.apply(&a(x));
    let k = |x: &[Complex64]| space.laplacian(x);
    let t = |x: &[Complex64]| space.solve(x, 0.0);
    let pair = largest(&a, &k, &t, space.len(), &opts.real())?;
    let constant = pair.value.max(0.0).sqrt();

    // Real witness: rotate the eigenvector so its largest entry is real.
    let pivot = pair
        .vector
        .iter()
        .copied()
        .max_by(|p, q| p.norm().total_cmp(&q.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { Complex64::new(1.0, 0.0) };
    let mut u: Vec<Complex64> = pair.vector.iter().map(|v| Complex64::new((v * phase).re, 0.0)).collect();
    let un = space.energy(&u).sqrt();
    if un > 0.0 {
        u.iter_mut().for_each(|x| *x /= un);
    }
    let mut v = space.solve(&c.apply(&u), 0.0);
    let vn = dot(&v, &space.laplacian(&v)).re.sqrt();
    if vn > 0.0 {
        v.iter_mut().for_each(|x| *x /= vn);
    }
    let scale = c.form(&u, &v).norm().max(f64::MIN_POSITIVE);
    let defect = if constant > 0.0 { c.form(&u, &u).norm() / scale } else { 0.0 };
    Ok(FormBoundReport {
        constant,
        iterations: pair.iterations,
        residual: pair.residual,
        mass_term: false,
        antisymmetry_defect: Some(defect),
        refinement_trace: vec![(d.grid().points_per_axis(), constant)],
        witness_u: Some(space.embed(&u)),
        witness_v: Some(space.embed(&v)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_band_limited, Grid};

    #[test]
    fn zero_drift() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        assert_eq!(commutator_constant(&VectorField::zeros(g)).unwrap().constant, 0.0);
    }

    #[test]
    fn witness_attains_the_constant_and_is_antisymmetric() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let d = VectorField::new(vec![
            random_band_limited(&g, 1, 3, true).unwrap(),
            random_band_limited(&g, 2, 3, true).unwrap(),
        ])
        .unwrap();
        let r = commutator_constant(&d).unwrap();
        assert!(r.antisymmetry_defect.unwrap() < 1e-12);
        let space = DirichletSpace::new(&g).unwrap();
        let c = CommutatorOperator::new(&space, &d).unwrap();
        let u = space.restrict(r.witness_u.as_ref().unwrap()).unwrap();
        let v = space.restrict(r.witness_v.as_ref().unwrap()).unwrap();
        let ratio = c.form(&u, &v).norm() / (space.energy(&u) * space.energy(&v)).sqrt();
        assert!(ratio >= r.constant - 1e-6, "{ratio} {}", r.constant);
    }
}
