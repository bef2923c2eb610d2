//! Extreme eigenpairs of Hermitian pencils `A x = θ B x` with `B` positive
//! definite, by block LOBPCG with a preconditioner and SVQB Rayleigh–Ritz.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrete::dot;
use crate::error::{Error, Result};

type Vector = Vec<Complex64>;

/// Matrix-free linear map.
pub trait Operator {
    fn apply(&self, x: &[Complex64]) -> Vector;
}

impl<F: Fn(&[Complex64]) -> Vector> Operator for F {
    fn apply(&self, x: &[Complex64]) -> Vector {
        self(x)
    }
}

/// Identity map, usable as a trivial preconditioner or mass matrix.
pub struct Identity;

impl Operator for Identity {
    fn apply(&self, x: &[Complex64]) -> Vector {
        x.to_vec()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub seed: u64,
    /// Relative residual `||Ax - θBx|| / (||Ax|| + |θ| ||Bx||)`.
    pub tol: f64,
    pub max_iter: usize,
    pub block: usize,
    /// Start from real vectors, for pencils with real matrices.
    pub real_start: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            tol: 1e-8,
            max_iter: 10_000,
            block: 3,
            real_start: false,
        }
    }
}

impl EigenOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn real(mut self) -> Self {
        self.real_start = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// `B`-normalized.
    pub vector: Vector,
    pub iterations: usize,
    pub residual: f64,
}

/// Smallest eigenpair of the pencil `(a, b)` on vectors of length `n`.
pub fn smallest(
    a: &dyn Operator,
    b: &dyn Operator,
    precond: &dyn Operator,
    n: usize,
    opts: &EigenOptions,
) -> Result<EigenPair> {
    lobpcg(a, b, precond, n, opts)
}

/// Largest eigenpair of the pencil `(a, b)`.
pub fn largest(
    a: &dyn Operator,
    b: &dyn Operator,
    precond: &dyn Operator,
    n: usize,
    opts: &EigenOptions,
) -> Result<EigenPair> {
    let neg = |x: &[Complex64]| -> Vector { a.apply(x).into_iter().map(|v| -v).collect() };
    let mut pair = lobpcg(&neg, b, precond, n, opts)?;
    pair.value = -pair.value;
    Ok(pair)
}

struct Block {
    x: Vec<Vector>,
    ax: Vec<Vector>,
    bx: Vec<Vector>,
}

impl Block {
    fn new() -> Self {
        Self {
            x: Vec::new(),
            ax: Vec::new(),
            bx: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.x.len()
    }

    fn push(&mut self, x: Vector, a: &dyn Operator, b: &dyn Operator, scale: &mut Scale) {
        let ax = a.apply(&x);
        let bx = b.apply(&x);
        scale.observe(&x, &ax, &bx);
        self.ax.push(ax);
        self.bx.push(bx);
        self.x.push(x);
    }

    fn extend(&mut self, other: &Block) {
        self.x.extend(other.x.iter().cloned());
        self.ax.extend(other.ax.iter().cloned());
        self.bx.extend(other.bx.iter().cloned());
    }

    fn recompute(&mut self, a: &dyn Operator, b: &dyn Operator) {
        self.ax = self.x.iter().map(|x| a.apply(x)).collect();
        self.bx = self.x.iter().map(|x| b.apply(x)).collect();
    }
}

/// Running lower estimates of `||A||` and `||B||` from every applied vector.
#[derive(Default)]
struct Scale {
    a: f64,
    b: f64,
}

impl Scale {
    fn observe(&mut self, x: &[Complex64], ax: &[Complex64], bx: &[Complex64]) {
        let nx = norm(x);
        if nx > 0.0 {
            self.a = self.a.max(norm(ax) / nx);
            self.b = self.b.max(norm(bx) / nx);
        }
    }

    /// Residual norms below this many rounding units of
    /// `(||A|| + |theta| ||B||) ||x||` cannot be reduced further.
    const FLOOR: f64 = 1e3 * f64::EPSILON;

    fn at_floor(&self, r: &[Complex64], x: &[Complex64], theta: f64) -> bool {
        norm(r) <= Self::FLOOR * (self.a + theta.abs() * self.b) * norm(x)
    }
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn combine(
    n: usize,
    cols: &[Vector],
    coeffs: &DMatrix<Complex64>,
    rows: std::ops::Range<usize>,
    j: usize,
) -> Vector {
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (r, col) in rows.zip(cols) {
        let c = coeffs[(r, j)];
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, v) in out.iter_mut().zip(col) {
            *o += c * v;
        }
    }
    out
}

fn gram(left: &[Vector], right: &[Vector]) -> DMatrix<Complex64> {
    let k = left.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = dot(&left[i], &right[j]);
        }
    }
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Ritz values in ascending order and coefficient matrix of the Ritz vectors
/// in the basis `s`, with small Gram directions removed.
fn rayleigh_ritz(s: &Block) -> Option<(Vec<f64>, DMatrix<Complex64>)> {
    let k = s.len();
    let gb = gram(&s.x, &s.bx);
    let ga = gram(&s.x, &s.ax);
    let mut scale = vec![0.0; k];
    for i in 0..k {
        let d = gb[(i, i)].re;
        if d > 0.0 && d.is_finite() {
            scale[i] = 1.0 / d.sqrt();
        }
    }
    let dm = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            Complex64::new(scale[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let m = &dm * gb * &dm;
    let eig = SymmetricEigen::new(m);
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..k).filter(|&i| eig.eigenvalues[i] > 1e-13 * top).collect();
    if keep.is_empty() {
        return None;
    }
    let q = DMatrix::from_fn(k, keep.len(), |i, j| {
        eig.eigenvectors[(i, keep[j])] * (scale[i] / eig.eigenvalues[keep[j]].sqrt())
    });
    let h = q.adjoint() * ga * &q;
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let he = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..keep.len()).collect();
    order.sort_by(|&i, &j| he.eigenvalues[i].total_cmp(&he.eigenvalues[j]));
    let values = order.iter().map(|&i| he.eigenvalues[i]).collect();
    let y = DMatrix::from_fn(keep.len(), keep.len(), |i, j| he.eigenvectors[(i, order[j])]);
    Some((values, q * y))
}

fn lobpcg(
    a: &dyn Operator,
    b: &dyn Operator,
    t: &dyn Operator,
    n: usize,
    opts: &EigenOptions,
) -> Result<EigenPair> {
    if n == 0 {
        return Err(Error::InvalidParameter("empty eigenproblem".into()));
    }
    let k = opts.block.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut scale = Scale::default();
    let mut x = Block::new();
    for _ in 0..k {
        let v: Vector = (0..n)
            .map(|_| {
                let re = rng.random_range(-1.0..1.0);
                let im = if opts.real_start { 0.0 } else { rng.random_range(-1.0..1.0) };
                Complex64::new(re, im)
            })
            .collect();
        x.push(v, a, b, &mut scale);
    }
    let mut x_count = k;
    let mut theta = vec![0.0; k];
    let mut residual = f64::INFINITY;
    let mut s = x;

    for iter in 0..=opts.max_iter {
        let nx = x_count;
        let (values, coeffs) = rayleigh_ritz(&s)
            .ok_or_else(|| Error::InvalidParameter("degenerate search space".into()))?;
        let kk = k.min(values.len());
        let mut newx = Block::new();
        let mut newp = Block::new();
        for j in 0..kk {
            newx.x.push(combine(n, &s.x, &coeffs, 0..s.len(), j));
            newx.ax.push(combine(n, &s.ax, &coeffs, 0..s.len(), j));
            newx.bx.push(combine(n, &s.bx, &coeffs, 0..s.len(), j));
            if nx < s.len() {
                newp.x.push(combine(n, &s.x[nx..], &coeffs, nx..s.len(), j));
                newp.ax.push(combine(n, &s.ax[nx..], &coeffs, nx..s.len(), j));
                newp.bx.push(combine(n, &s.bx[nx..], &coeffs, nx..s.len(), j));
            }
        }
        theta[..kk].copy_from_slice(&values[..kk]);
        if iter % 25 == 24 {
            newx.recompute(a, b);
            newp.recompute(a, b);
        }

        let residuals: Vec<Vector> = (0..kk)
            .map(|j| {
                newx.ax[j]
                    .iter()
                    .zip(&newx.bx[j])
                    .map(|(ax, bx)| ax - bx * theta[j])
                    .collect()
            })
            .collect();
        let rel = |j: usize, r: &[Complex64], xb: &Block| {
            let denom = norm(&xb.ax[j]) + theta[j].abs() * norm(&xb.bx[j]);
            if denom > 0.0 {
                norm(r) / denom
            } else {
                0.0
            }
        };
        residual = rel(0, &residuals[0], &newx);
        if residual < opts.tol || scale.at_floor(&residuals[0], &newx.x[0], theta[0]) {
            let exact_ax = a.apply(&newx.x[0]);
            let exact_bx = b.apply(&newx.x[0]);
            let bnorm = dot(&newx.x[0], &exact_bx).re.sqrt();
            let value = dot(&newx.x[0], &exact_ax).re / (bnorm * bnorm);
            let r: Vector = exact_ax.iter().zip(&exact_bx).map(|(p, q)| p - q * value).collect();
            let denom = norm(&exact_ax) + value.abs() * norm(&exact_bx);
            let true_res = if denom > 0.0 { norm(&r) / denom } else { 0.0 };
            if true_res < opts.tol || scale.at_floor(&r, &newx.x[0], value) || n <= k {
                return Ok(EigenPair {
                    value,
                    vector: newx.x[0].iter().map(|v| v / bnorm).collect(),
                    iterations: iter,
                    residual: true_res,
                });
            }
            newx.recompute(a, b);
            newp.recompute(a, b);
        }
        if iter == opts.max_iter {
            break;
        }

        let mut w = Block::new();
        for (j, r) in residuals.iter().enumerate() {
            if j > 0 && rel(j, r, &newx) < opts.tol {
                continue;
            }
            let tr = t.apply(r);
            let nr = norm(&tr);
            if nr > 0.0 && nr.is_finite() {
                w.push(tr.iter().map(|v| v / nr).collect(), a, b, &mut scale);
            }
        }
        let mut next = Block::new();
        next.extend(&newx);
        next.extend(&w);
        next.extend(&newp);
        x_count = newx.len();
        s = next;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

/// Hermitian matrix `A` on small problems, assembled column by column.
pub fn dense(op: &dyn Operator, n: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        let col = op.apply(&e);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = Complex64::new(0.0, 0.0);
    }
    m
}
