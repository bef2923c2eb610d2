//! Periodic-box geometry, sampled fields and spectral calculus.

mod calculus;
pub mod fft;
mod grid;
pub mod io;
mod testfn;

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use calculus::{
    curl_matrix, div, div_matrix_rows, grad, hessian, inv_laplacian, laplacian, wavenumber,
    InverseLaplacian,
};
pub(crate) use calculus::{
    div_matrix_rows_nyquist_free, div_nyquist_free, upsample,
};
pub use grid::{Grid, Index3};
pub use testfn::{make_test_function, make_test_function_with, random_band_limited, TestFunctionSpec};

/// Complex scalar samples on a grid, with a lazily computed DFT.
#[derive(Debug)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<Complex64>,
    spectral: OnceLock<Vec<Complex64>>,
}

impl Clone for ScalarField {
    fn clone(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.clone(),
            spectral: self.spectral.clone(),
        }
    }
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self::from_vec_unchecked(grid, values))
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
        Self {
            grid,
            values,
            spectral: OnceLock::new(),
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn constant(grid: Grid, value: Complex64) -> Self {
        Self::from_vec_unchecked(grid, vec![value; grid.len()])
    }

    /// Samples `f` at every grid position.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> Complex64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|l| f(grid.position(grid.multi(l))))
            .collect();
        Self::new(grid, values)
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Builds a field from Fourier coefficients (unnormalized forward DFT layout).
    pub fn from_spectral(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        let mut values = coeffs.clone();
        fft::inverse(&mut values, grid.dim(), grid.points_per_axis());
        let field = Self::from_vec_unchecked(grid, values);
        let _ = field.spectral.set(coeffs);
        field
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Unnormalized forward DFT of the samples, computed once.
    pub fn spectral(&self) -> &[Complex64] {
        self.spectral.get_or_init(|| {
            let mut c = self.values.clone();
            fft::forward(&mut c, self.grid.dim(), self.grid.points_per_axis());
            c
        })
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_vec_unchecked(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(
        &self,
        other: &ScalarField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_vec_unchecked(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn re(&self) -> Self {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn im(&self) -> Self {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// `sum u conj(v) dV`.
    pub fn inner(&self, other: &ScalarField) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * self.grid.cell_volume())
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Value of the trigonometric interpolant at an arbitrary point.
    pub fn interpolate(&self, x: [f64; 3]) -> Complex64 {
        let g = self.grid;
        let n = g.points_per_axis();
        let coeffs = self.spectral();
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, c) in coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let idx = g.multi(l);
            let mut phase = 0.0;
            let mut weight = 1.0;
            for a in 0..g.dim() {
                let k = fft::signed_frequency(idx[a], n);
                // Split the Nyquist bin symmetrically so real data interpolates to real values.
                if idx[a] == n / 2 {
                    weight *= (std::f64::consts::PI * n as f64 * x[a] / g.side_length(a)).cos();
                } else {
                    phase += 2.0 * std::f64::consts::PI * k as f64 * x[a] / g.side_length(a);
                }
            }
            acc += c * Complex64::from_polar(weight, phase);
        }
        acc / g.len() as f64
    }
}

/// `dim` complex components on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let grid = *components
            .first()
            .ok_or_else(|| Error::InvalidGrid("vector field needs components".into()))?
            .grid();
        if components.len() != grid.dim() {
            return Err(Error::Dimension {
                expected: format!("{} components", grid.dim()),
                found: components.len(),
            });
        }
        for c in &components {
            grid.check_same(c.grid())?;
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            components: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn constant(grid: Grid, value: &[Complex64]) -> Result<Self> {
        if value.len() != grid.dim() {
            return Err(Error::Dimension {
                expected: format!("{} components", grid.dim()),
                found: value.len(),
            });
        }
        Ok(Self {
            grid,
            components: value.iter().map(|&v| ScalarField::constant(grid, v)).collect(),
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [Complex64; 3]) -> Result<Self> {
        let samples: Vec<[Complex64; 3]> = (0..grid.len())
            .map(|l| f(grid.position(grid.multi(l))))
            .collect();
        let components = (0..grid.dim())
            .map(|a| ScalarField::new(grid, samples.iter().map(|s| s[a]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, components })
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Self> {
        Self::from_fn(grid, |x| {
            let v = f(x);
            [
                Complex64::new(v[0], 0.0),
                Complex64::new(v[1], 0.0),
                Complex64::new(v[2], 0.0),
            ]
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.components[axis]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            grid: self.grid,
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn zip_map(
        &self,
        other: &VectorField,
        f: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>,
    ) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        self.zip_map(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        self.zip_map(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn re(&self) -> Self {
        self.map(|c| c.re())
    }

    pub fn im(&self) -> Self {
        self.map(|c| c.im())
    }

    pub fn mean(&self) -> Vec<Complex64> {
        self.components.iter().map(|c| c.mean()).collect()
    }

    /// Pointwise `sum_j |v_j|^2` as a real scalar field.
    pub fn norm_sqr(&self) -> ScalarField {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for c in &self.components {
            for (o, v) in out.iter_mut().zip(c.values()) {
                o.re += v.norm_sqr();
            }
        }
        ScalarField::from_vec_unchecked(self.grid, out)
    }

    /// `sum_j <v_j, w_j>` in L2.
    pub fn inner(&self, other: &VectorField) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.components.iter().zip(&other.components) {
            acc += a.inner(b)?;
        }
        Ok(acc)
    }

    pub fn l2_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Pointwise maximum of the Euclidean norm.
    pub fn max_norm(&self) -> f64 {
        self.norm_sqr()
            .values()
            .iter()
            .map(|v| v.re.sqrt())
            .fold(0.0, f64::max)
    }

    /// Pointwise dot product `sum_j v_j w_j` (no conjugation).
    pub fn dot(&self, other: &VectorField) -> Result<ScalarField> {
        self.grid.check_same(&other.grid)?;
        let mut out = ScalarField::zeros(self.grid);
        for (a, b) in self.components.iter().zip(&other.components) {
            out = out.add(&a.mul(b)?)?;
        }
        Ok(out)
    }
}

/// `dim x dim` complex entries, row-major (`entry(j, k)` is row `j`, column `k`).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    grid: Grid,
    entries: Vec<ScalarField>,
    skew: bool,
}

/// Relative tolerance used when validating claimed skew symmetry.
const SKEW_TOL: f64 = 1e-13;

impl MatrixField {
    pub fn new(entries: Vec<ScalarField>) -> Result<Self> {
        let grid = *entries
            .first()
            .ok_or_else(|| Error::InvalidGrid("matrix field needs entries".into()))?
            .grid();
        let d = grid.dim();
        if entries.len() != d * d {
            return Err(Error::Dimension {
                expected: format!("{} entries", d * d),
                found: entries.len(),
            });
        }
        for e in &entries {
            grid.check_same(e.grid())?;
        }
        Ok(Self {
            grid,
            entries,
            skew: false,
        })
    }

    /// Validates `F + F^T = 0` and sets the skew flag.
    pub fn new_skew(entries: Vec<ScalarField>) -> Result<Self> {
        let mut m = Self::new(entries)?;
        let defect = m.skew_defect();
        let scale = m.max_norm().max(1.0);
        if defect > SKEW_TOL * scale {
            return Err(Error::NotSkew(defect));
        }
        m.skew = true;
        Ok(m)
    }

    pub fn zeros(grid: Grid) -> Self {
        let d = grid.dim();
        Self {
            grid,
            entries: (0..d * d).map(|_| ScalarField::zeros(grid)).collect(),
            skew: false,
        }
    }

    pub fn identity(grid: Grid) -> Self {
        Self::scalar_multiple(grid, Complex64::new(1.0, 0.0))
    }

    pub fn scalar_multiple(grid: Grid, s: Complex64) -> Self {
        let d = grid.dim();
        let entries = (0..d * d)
            .map(|e| {
                if e / d == e % d {
                    ScalarField::constant(grid, s)
                } else {
                    ScalarField::zeros(grid)
                }
            })
            .collect();
        Self {
            grid,
            entries,
            skew: false,
        }
    }

    /// Diagonal matrix field with the given diagonal entries.
    pub fn diagonal(diag: Vec<ScalarField>) -> Result<Self> {
        let grid = *diag
            .first()
            .ok_or_else(|| Error::InvalidGrid("diagonal needs entries".into()))?
            .grid();
        let d = grid.dim();
        if diag.len() != d {
            return Err(Error::Dimension {
                expected: format!("{d} diagonal entries"),
                found: diag.len(),
            });
        }
        let mut entries: Vec<ScalarField> = (0..d * d).map(|_| ScalarField::zeros(grid)).collect();
        for (j, f) in diag.into_iter().enumerate() {
            grid.check_same(f.grid())?;
            entries[j * d + j] = f;
        }
        Self::new(entries)
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [[Complex64; 3]; 3]) -> Result<Self> {
        let d = grid.dim();
        let samples: Vec<[[Complex64; 3]; 3]> = (0..grid.len())
            .map(|l| f(grid.position(grid.multi(l))))
            .collect();
        let entries = (0..d * d)
            .map(|e| ScalarField::new(grid, samples.iter().map(|s| s[e / d][e % d]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> &ScalarField {
        &self.entries[row * self.grid.dim() + col]
    }

    pub fn entries(&self) -> &[ScalarField] {
        &self.entries
    }

    pub fn is_skew(&self) -> bool {
        self.skew
    }

    pub(crate) fn with_skew_flag(mut self, skew: bool) -> Self {
        self.skew = skew;
        self
    }

    pub fn transpose(&self) -> Self {
        let d = self.grid.dim();
        let entries = (0..d * d)
            .map(|e| self.entries[(e % d) * d + e / d].clone())
            .collect();
        Self {
            grid: self.grid,
            entries,
            skew: self.skew,
        }
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            grid: self.grid,
            entries: self.entries.iter().map(f).collect(),
            skew: false,
        }
    }

    pub fn zip_map(
        &self,
        other: &MatrixField,
        f: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>,
    ) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect::<Result<Vec<_>>>()?,
            skew: false,
        })
    }

    pub fn add(&self, other: &MatrixField) -> Result<Self> {
        let skew = self.skew && other.skew;
        Ok(self.zip_map(other, |a, b| a.add(b))?.with_skew_flag(skew))
    }

    pub fn sub(&self, other: &MatrixField) -> Result<Self> {
        let skew = self.skew && other.skew;
        Ok(self.zip_map(other, |a, b| a.sub(b))?.with_skew_flag(skew))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let skew = self.skew;
        self.map(|e| e.scale(s)).with_skew_flag(skew)
    }

    pub fn re(&self) -> Self {
        let skew = self.skew;
        self.map(|e| e.re()).with_skew_flag(skew)
    }

    pub fn im(&self) -> Self {
        let skew = self.skew;
        self.map(|e| e.im()).with_skew_flag(skew)
    }

    /// `max |F + F^T|` over entries and points.
    pub fn skew_defect(&self) -> f64 {
        let d = self.grid.dim();
        let mut worst: f64 = 0.0;
        for j in 0..d {
            for k in j..d {
                for (a, b) in self.entry(j, k).values().iter().zip(self.entry(k, j).values()) {
                    worst = worst.max((a + b).norm());
                }
            }
        }
        worst
    }

    /// `max |F - F^T|` over entries and points.
    pub fn symmetry_defect(&self) -> f64 {
        let d = self.grid.dim();
        let mut worst: f64 = 0.0;
        for j in 0..d {
            for k in j + 1..d {
                for (a, b) in self.entry(j, k).values().iter().zip(self.entry(k, j).values()) {
                    worst = worst.max((a - b).norm());
                }
            }
        }
        worst
    }

    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.max_norm()).fold(0.0, f64::max)
    }

    /// Frobenius L2 norm.
    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Entrywise means.
    pub fn mean(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.mean()).collect()
    }

    /// Pointwise matrix-vector product `F v`.
    pub fn apply(&self, v: &VectorField) -> Result<VectorField> {
        self.grid.check_same(v.grid())?;
        let d = self.grid.dim();
        let comps = (0..d)
            .map(|j| {
                let mut acc = ScalarField::zeros(self.grid);
                for k in 0..d {
                    acc = acc.add(&self.entry(j, k).mul(v.component(k))?)?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(comps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_samples() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(ScalarField::new(g, v), Err(Error::NonFinite(3))));
    }

    #[test]
    fn parseval_holds() {
        let g = Grid::new(2, 16, 1.3).unwrap();
        let u = ScalarField::from_fn(g, |x| {
            Complex64::new((3.0 * x[0]).sin() + x[1] * x[1], (x[0] * x[1]).cos())
        })
        .unwrap();
        let v = ScalarField::from_fn(g, |x| Complex64::new(x[0] - x[1], 0.3)).unwrap();
        let physical = u.inner(&v).unwrap();
        let spectral: Complex64 = u
            .spectral()
            .iter()
            .zip(v.spectral())
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * g.cell_volume()
            / g.len() as f64;
        assert!((physical - spectral).norm() <= 1e-12 * physical.norm());
    }

    #[test]
    fn skew_constructor_validates() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let one = ScalarField::constant(g, Complex64::new(1.0, 0.0));
        let z = ScalarField::zeros(g);
        assert!(MatrixField::new_skew(vec![z.clone(), one.clone(), one.scale((-1.0).into()), z.clone()]).is_ok());
        assert!(matches!(
            MatrixField::new_skew(vec![z.clone(), one.clone(), one, z]),
            Err(Error::NotSkew(_))
        ));
    }

    #[test]
    fn interpolation_reproduces_samples_and_modes() {
        let g = Grid::new(1, 16, 2.0).unwrap();
        let f = ScalarField::from_real_fn(g, |x| (std::f64::consts::PI * x[0]).cos()).unwrap();
        for x in [0.0, 0.125, 0.3, 1.7] {
            let v = f.interpolate([x, 0.0, 0.0]);
            assert!((v.re - (std::f64::consts::PI * x).cos()).abs() < 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
    }
}
