//! Coefficient sets, the symmetric/skew split, the reduction to divergence
//! form, the real symbol triple `(P, d, sigma)` and sesquilinear forms.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    div_matrix_rows, div_matrix_rows_nyquist_free, div_nyquist_free, grad, hessian, Grid,
    MatrixField, ScalarField, VectorField,
};

/// Which representation the principal part is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormTag {
    /// `L u = div(A grad u) + b . grad u + c u`.
    Divergence,
    /// `L u = sum A_jk d_j d_k u + b . grad u + c u`.
    Nondivergence,
}

/// Atom `weight * delta(x - location)` in one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub location: f64,
    pub weight: Complex64,
}

/// The triple `(A, b, c)` of a second-order operator.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub a: MatrixField,
    pub b: VectorField,
    pub c: ScalarField,
    pub form: FormTag,
    pub point_masses: Vec<PointMass>,
}

impl CoefficientSet {
    pub fn new(a: MatrixField, b: VectorField, c: ScalarField, form: FormTag) -> Result<Self> {
        a.grid().check_same(b.grid())?;
        a.grid().check_same(c.grid())?;
        Ok(Self {
            a,
            b,
            c,
            form,
            point_masses: Vec::new(),
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            a: MatrixField::zeros(grid),
            b: VectorField::zeros(grid),
            c: ScalarField::zeros(grid),
            form: FormTag::Divergence,
            point_masses: Vec::new(),
        }
    }

    /// `L = Δ` in divergence form.
    pub fn laplacian(grid: Grid) -> Self {
        Self {
            a: MatrixField::identity(grid),
            ..Self::zeros(grid)
        }
    }

    /// `L = Δ + c`.
    pub fn schrodinger(c: ScalarField) -> Self {
        let grid = *c.grid();
        Self {
            c,
            ..Self::laplacian(grid)
        }
    }

    /// `L = c` (no principal part).
    pub fn potential(c: ScalarField) -> Self {
        let grid = *c.grid();
        Self {
            c,
            ..Self::zeros(grid)
        }
    }

    /// `L = b . grad` (no principal part).
    pub fn drift(b: VectorField) -> Self {
        let grid = *b.grid();
        Self {
            b,
            ..Self::zeros(grid)
        }
    }

    pub fn with_point_masses(mut self, atoms: Vec<PointMass>) -> Result<Self> {
        if !atoms.is_empty() && self.grid().dim() != 1 {
            return Err(Error::PointMassDimension);
        }
        for a in &atoms {
            if !(a.location.is_finite() && a.weight.re.is_finite() && a.weight.im.is_finite()) {
                return Err(Error::InvalidParameter("non-finite point mass".into()));
            }
        }
        self.point_masses = atoms;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        self.a.grid()
    }

    /// All coefficients (and atoms) multiplied by `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            a: self.a.scale(s),
            b: self.b.scale(s),
            c: self.c.scale(s),
            form: self.form,
            point_masses: self
                .point_masses
                .iter()
                .map(|p| PointMass {
                    location: p.location,
                    weight: p.weight * s,
                })
                .collect(),
        }
    }

    /// Coefficients of `-L`.
    pub fn negated(&self) -> Self {
        self.scaled(Complex64::new(-1.0, 0.0))
    }
}

/// `A = A_s + A_c` with `A_s = (A + A^T)/2` and `A_c = (A - A^T)/2`.
pub fn split_symmetric(a: &MatrixField) -> (MatrixField, MatrixField) {
    let at = a.transpose();
    let half = Complex64::new(0.5, 0.0);
    let sym = a.add(&at).expect("same grid").scale(half);
    let d = a.grid().dim();
    // Build the skew part entrywise so that it is exactly antisymmetric.
    let mut entries: Vec<ScalarField> = (0..d * d).map(|_| ScalarField::zeros(*a.grid())).collect();
    for j in 0..d {
        for k in j + 1..d {
            let e = a.entry(j, k).sub(a.entry(k, j)).expect("same grid").scale(half);
            entries[k * d + j] = e.scale(Complex64::new(-1.0, 0.0));
            entries[j * d + k] = e;
        }
    }
    let skew = MatrixField::new(entries)
        .expect("same grid")
        .with_skew_flag(true);
    (sym, skew)
}

/// Rewrites a nondivergence-form set in divergence form.
///
/// Integrating `A_jk d_j d_k u` against `conj v` by parts moves `d_j A_jk`
/// onto the drift, so the new drift is `b - Div(A^T)`. For symmetric `A`
/// this is `b - Div A`.
pub fn to_divergence_form(cs: &CoefficientSet) -> Result<CoefficientSet> {
    if cs.form != FormTag::Nondivergence {
        return Err(Error::FormTag {
            expected: "nondivergence",
        });
    }
    let b = cs.b.sub(&div_matrix_rows(&cs.a.transpose()))?;
    Ok(CoefficientSet {
        a: cs.a.clone(),
        b,
        c: cs.c.clone(),
        form: FormTag::Divergence,
        point_masses: cs.point_masses.clone(),
    })
}

/// Real symbols `P = Re A_s`, `d = (Im b - Div Im A_c)/2`,
/// `sigma = Re c - div(Re b)/2`, with the ellipticity range of `P`.
///
/// The derivatives drop the Nyquist bin so that all three are real.
#[derive(Debug, Clone)]
pub struct ReducedSymbols {
    pub p: MatrixField,
    pub d: VectorField,
    pub sigma: ScalarField,
    /// Real parts of the atoms of `c`.
    pub sigma_atoms: Vec<PointMass>,
    pub ellipticity_lower: f64,
    pub ellipticity_upper: f64,
}

impl ReducedSymbols {
    /// Operator `L_2 = div(P grad) + 2i d . grad + sigma` with the same real
    /// part of its quadratic form as the original operator.
    pub fn operator(&self) -> CoefficientSet {
        CoefficientSet {
            a: self.p.clone(),
            b: self.d.scale(Complex64::new(0.0, 2.0)),
            c: self.sigma.clone(),
            form: FormTag::Divergence,
            point_masses: self.sigma_atoms.clone(),
        }
    }

    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.ellipticity_lower >= -tol
    }
}

pub fn reduce_symbols(cs: &CoefficientSet) -> Result<ReducedSymbols> {
    let cs = match cs.form {
        FormTag::Divergence => cs.clone(),
        FormTag::Nondivergence => to_divergence_form(cs)?,
    };
    let (sym, skew) = split_symmetric(&cs.a);
    let p = sym.re();
    let im_skew_div = div_matrix_rows_nyquist_free(&skew.im());
    let d = cs
        .b
        .im()
        .sub(&im_skew_div)?
        .scale(Complex64::new(0.5, 0.0));
    let sigma = cs
        .c
        .re()
        .sub(&div_nyquist_free(&cs.b.re()).scale(Complex64::new(0.5, 0.0)))?;
    let sigma_atoms = cs
        .point_masses
        .iter()
        .map(|a| PointMass {
            location: a.location,
            weight: Complex64::new(a.weight.re, 0.0),
        })
        .collect();
    let (lo, hi) = ellipticity_range(&p);
    Ok(ReducedSymbols {
        p,
        d,
        sigma,
        sigma_atoms,
        ellipticity_lower: lo,
        ellipticity_upper: hi,
    })
}

/// Real symmetric `dim x dim` matrix of `P` at one grid point.
pub(crate) fn matrix_at(p: &MatrixField, l: usize) -> DMatrix<f64> {
    let d = p.grid().dim();
    DMatrix::from_fn(d, d, |j, k| {
        0.5 * (p.entry(j, k).values()[l].re + p.entry(k, j).values()[l].re)
    })
}

/// Pointwise smallest and largest eigenvalues of a real symmetric field.
pub fn ellipticity_range(p: &MatrixField) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for l in 0..p.grid().len() {
        let eig = SymmetricEigen::new(matrix_at(p, l)).eigenvalues;
        lo = lo.min(eig.min());
        hi = hi.max(eig.max());
    }
    (lo, hi)
}

/// Point and direction of the most negative pointwise eigenvalue of `P`.
pub fn most_negative_direction(p: &MatrixField) -> (usize, f64, Vec<f64>) {
    let mut best = (0, f64::INFINITY, Vec::new());
    for l in 0..p.grid().len() {
        let eig = SymmetricEigen::new(matrix_at(p, l));
        let (i, &v) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        if v < best.1 {
            best = (l, v, eig.eigenvectors.column(i).iter().copied().collect());
        }
    }
    best
}

/// Quadrature oversampling used by [`sesquilinear`].
const OVERSAMPLE: usize = 2;

fn fine(f: &ScalarField) -> Result<ScalarField> {
    crate::field::upsample(f, OVERSAMPLE)
}

fn fine_vec(v: &VectorField) -> Result<Vec<ScalarField>> {
    v.components().iter().map(fine).collect()
}

/// `<L u, v>` for test functions `u`, `v`.
///
/// All factors are evaluated as trigonometric interpolants on a twice finer
/// grid, where the trapezoid rule integrates every triple product exactly.
/// Integration-by-parts identities between representations therefore hold
/// to rounding. Atoms use the interpolated values `u(x0) conj(v(x0))`.
pub fn sesquilinear(cs: &CoefficientSet, u: &ScalarField, v: &ScalarField) -> Result<Complex64> {
    let grid = *cs.grid();
    grid.check_same(u.grid())?;
    grid.check_same(v.grid())?;
    let d = grid.dim();
    let uf = fine(u)?;
    let vf = fine(v)?;
    let gu = fine_vec(&grad(u))?;
    let bf = fine_vec(&cs.b)?;
    let cf = fine(&cs.c)?;
    let nf = uf.values().len();
    let mut acc = vec![Complex64::new(0.0, 0.0); nf];
    match cs.form {
        FormTag::Divergence => {
            let gv = fine_vec(&grad(v))?;
            for j in 0..d {
                for k in 0..d {
                    let a = fine(cs.a.entry(j, k))?;
                    for (i, o) in acc.iter_mut().enumerate() {
                        *o -= a.values()[i] * gu[k].values()[i] * gv[j].values()[i].conj();
                    }
                }
            }
        }
        FormTag::Nondivergence => {
            let h = hessian(u);
            for j in 0..d {
                for k in 0..d {
                    let a = fine(cs.a.entry(j, k))?;
                    let hjk = fine(h.entry(j, k))?;
                    for (i, o) in acc.iter_mut().enumerate() {
                        *o += a.values()[i] * hjk.values()[i] * vf.values()[i].conj();
                    }
                }
            }
        }
    }
    for (k, bk) in bf.iter().enumerate() {
        for (i, o) in acc.iter_mut().enumerate() {
            *o += bk.values()[i] * gu[k].values()[i] * vf.values()[i].conj();
        }
    }
    for (i, o) in acc.iter_mut().enumerate() {
        *o += cf.values()[i] * uf.values()[i] * vf.values()[i].conj();
    }
    let mut total = acc.iter().sum::<Complex64>() * uf.grid().cell_volume();
    for atom in &cs.point_masses {
        let x = [atom.location, 0.0, 0.0];
        total += atom.weight * u.interpolate(x) * v.interpolate(x).conj();
    }
    Ok(total)
}

/// `||grad u||^2` of the trigonometric interpolant.
pub fn dirichlet_energy(u: &ScalarField) -> f64 {
    grad(u).l2_norm().powi(2)
}
