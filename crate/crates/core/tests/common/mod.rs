//! Dense oracles and seeded inputs shared by the integration tests.
#![allow(dead_code)]

use formlab::discrete::{DirichletSpace, DiscreteOperator};
use formlab::eigen::dense;
use formlab::field::{random_band_limited, Grid, MatrixField, ScalarField, VectorField};
use formlab::reduction::{CoefficientSet, FormTag};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type C = Complex64;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Dirichlet difference Laplacian assembled from the `(2n+1)`-point stencil.
pub fn dense_laplacian(space: &DirichletSpace) -> DMatrix<C> {
    let n = space.len();
    let vol = space.cell_volume();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for a in 0..space.dim() {
            let w = vol / space.spacing(a).powi(2);
            k[(i, i)] += c(2.0 * w);
            for fwd in [true, false] {
                if let Some(j) = space.neighbor(i, a, fwd) {
                    k[(i, j)] -= c(w);
                }
            }
        }
    }
    k
}

/// `L^-1 M L^-H` for the Cholesky factor `L` of `k`.
pub fn congruence(k: &DMatrix<C>, m: &DMatrix<C>) -> DMatrix<C> {
    let l = k.clone().cholesky().expect("positive definite").l();
    let left = l.solve_lower_triangular(m).expect("triangular");
    let right = l
        .solve_lower_triangular(&left.adjoint())
        .expect("triangular");
    right.adjoint()
}

pub fn largest_singular_value(m: &DMatrix<C>) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

pub fn hermitian_eigenvalues(m: &DMatrix<C>) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5);
    let mut v: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn operator_matrix(op: &DiscreteOperator) -> DMatrix<C> {
    let f = |x: &[C]| op.apply(x);
    dense(&f, op.space().len())
}

/// `sup |v^H B u| / (|u|_K |v|_K)` with `K` plus the mass matrix when requested.
pub fn form_bound_oracle(cs: &CoefficientSet, mass_term: bool) -> f64 {
    let space = DirichletSpace::new(cs.grid()).unwrap();
    let b = operator_matrix(&DiscreteOperator::from_coefficients(&space, cs).unwrap());
    let mut k = dense_laplacian(&space);
    if mass_term {
        for i in 0..space.len() {
            k[(i, i)] += c(space.cell_volume());
        }
    }
    largest_singular_value(&congruence(&k, &b))
}

/// `min Re(-v^H B v) / |v|_K^2`.
pub fn accretivity_oracle(cs: &CoefficientSet) -> f64 {
    let space = DirichletSpace::new(cs.grid()).unwrap();
    let b = operator_matrix(&DiscreteOperator::from_coefficients(&space, cs).unwrap());
    let h = -(&b + b.adjoint()) * c(0.5);
    hermitian_eigenvalues(&congruence(&dense_laplacian(&space), &h))[0]
}

/// Antisymmetric commutator matrix assembled from
/// `sum_i dV d_i . (u_i D0 v_i - v_i D0 u_i)`.
pub fn commutator_oracle(d: &VectorField) -> f64 {
    let space = DirichletSpace::new(d.grid()).unwrap();
    let n = space.len();
    let vol = space.cell_volume();
    let mut m = DMatrix::<C>::zeros(n, n);
    for i in 0..n {
        let g = space.grid_index(i);
        for a in 0..space.dim() {
            let w = vol * d.component(a).values()[g].re / (2.0 * space.spacing(a));
            if let Some(j) = space.neighbor(i, a, true) {
                m[(j, i)] += c(w);
                m[(i, j)] -= c(w);
            }
            if let Some(j) = space.neighbor(i, a, false) {
                m[(j, i)] -= c(w);
                m[(i, j)] += c(w);
            }
        }
    }
    largest_singular_value(&congruence(&dense_laplacian(&space), &m))
}

/// `sqrt(max_u sum dV mu |u|^2 / |u|_K^2)`.
pub fn trace_oracle(mu: &ScalarField) -> f64 {
    let space = DirichletSpace::new(mu.grid()).unwrap();
    let n = space.len();
    let w = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|i| c(space.cell_volume() * mu.values()[space.grid_index(i)].re)),
    ));
    let top = *hermitian_eigenvalues(&congruence(&dense_laplacian(&space), &w))
        .last()
        .unwrap();
    top.max(0.0).sqrt()
}

pub fn random_field(g: &Grid, seed: u64, band: usize, real: bool) -> ScalarField {
    random_band_limited(g, seed, band, real).unwrap()
}

pub fn random_vector(g: &Grid, seed: u64, band: usize, real: bool) -> VectorField {
    VectorField::new(
        (0..g.dim())
            .map(|a| random_field(g, seed * 31 + a as u64, band, real))
            .collect(),
    )
    .unwrap()
}

/// Random complex coefficients; `elliptic` adds `1.5 I` to a small perturbation.
pub fn random_coefficients(g: &Grid, seed: u64, elliptic: bool) -> CoefficientSet {
    let d = g.dim();
    let band = 2;
    let mut entries: Vec<ScalarField> = (0..d * d)
        .map(|e| random_field(g, seed * 1000 + e as u64, band, false))
        .collect();
    if elliptic {
        for (e, f) in entries.iter_mut().enumerate() {
            *f = f.scale(c(0.3));
            if e / d == e % d {
                *f = f.add(&ScalarField::constant(*g, c(1.5))).unwrap();
            }
        }
    }
    CoefficientSet::new(
        MatrixField::new(entries).unwrap(),
        random_vector(g, seed * 1000 + 100, band, false),
        random_field(g, seed * 1000 + 200, band, false),
        if seed % 2 == 0 {
            FormTag::Divergence
        } else {
            FormTag::Nondivergence
        },
    )
    .unwrap()
}

pub fn small_grid(seed: u64) -> Grid {
    let dim = 1 + (seed % 3) as usize;
    Grid::new(dim, 16, 1.0).unwrap().with_inner_fraction(0.75).unwrap()
}
