//! Spectral derivatives on the periodic box.
//!
//! Every operator is a Fourier multiplier with symbol `i k` per derivative.
//! The Nyquist bin keeps its one-sided symbol, so `laplacian == div . grad`,
//! `curl . grad == 0` and `div . Div == 0` on skew fields hold to rounding.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{fft, Grid, MatrixField, ScalarField, VectorField};
use crate::error::Result;

/// Angular wavenumber of DFT bin `bin` along `axis`.
#[inline]
pub fn wavenumber(grid: &Grid, axis: usize, bin: usize) -> f64 {
    2.0 * PI * fft::signed_frequency(bin, grid.points_per_axis()) as f64 / grid.side_length(axis)
}

fn wavevectors(grid: &Grid) -> Vec<[f64; 3]> {
    (0..grid.len())
        .map(|l| {
            let idx = grid.multi(l);
            let mut k = [0.0; 3];
            for (a, ka) in k.iter_mut().enumerate().take(grid.dim()) {
                *ka = wavenumber(grid, a, idx[a]);
            }
            k
        })
        .collect()
}

/// Applies the Fourier multiplier `symbol(k)` to `f`.
pub(crate) fn multiplier(f: &ScalarField, symbol: impl Fn(&[f64; 3]) -> Complex64) -> ScalarField {
    let grid = *f.grid();
    let coeffs: Vec<Complex64> = f
        .spectral()
        .iter()
        .zip(wavevectors(&grid))
        .map(|(c, k)| c * symbol(&k))
        .collect();
    ScalarField::from_spectral(grid, coeffs)
}

fn partial(f: &ScalarField, axis: usize) -> ScalarField {
    multiplier(f, |k| Complex64::new(0.0, k[axis]))
}

/// Spectral gradient.
pub fn grad(f: &ScalarField) -> VectorField {
    let comps = (0..f.grid().dim())
        .into_par_iter()
        .map(|a| partial(f, a))
        .collect();
    VectorField::new(comps).expect("gradient components share a grid")
}

/// Spectral divergence `sum_j d_j v_j`.
pub fn div(v: &VectorField) -> ScalarField {
    let grid = *v.grid();
    let coeffs = v
        .components()
        .iter()
        .enumerate()
        .fold(vec![Complex64::new(0.0, 0.0); grid.len()], |mut acc, (a, c)| {
            for ((o, x), k) in acc.iter_mut().zip(c.spectral()).zip(wavevectors(&grid)) {
                *o += x * Complex64::new(0.0, k[a]);
            }
            acc
        });
    ScalarField::from_spectral(grid, coeffs)
}

/// `Curl v = (d_j v_k - d_k v_j)_{jk}`, stored exactly skew.
pub fn curl_matrix(v: &VectorField) -> MatrixField {
    let grid = *v.grid();
    let d = grid.dim();
    let mut entries: Vec<ScalarField> = (0..d * d).map(|_| ScalarField::zeros(grid)).collect();
    for j in 0..d {
        for k in j + 1..d {
            let djvk = partial(v.component(k), j);
            let dkvj = partial(v.component(j), k);
            let e = djvk.sub(&dkvj).expect("same grid");
            entries[k * d + j] = e.scale(Complex64::new(-1.0, 0.0));
            entries[j * d + k] = e;
        }
    }
    MatrixField::new(entries)
        .expect("curl entries share a grid")
        .with_skew_flag(true)
}

/// Row divergence `Div F = (sum_k d_k F_jk)_j`.
pub fn div_matrix_rows(f: &MatrixField) -> VectorField {
    let grid = *f.grid();
    let d = grid.dim();
    let comps = (0..d)
        .map(|j| {
            let coeffs = (0..d).fold(vec![Complex64::new(0.0, 0.0); grid.len()], |mut acc, k| {
                for ((o, x), kv) in acc
                    .iter_mut()
                    .zip(f.entry(j, k).spectral())
                    .zip(wavevectors(&grid))
                {
                    *o += x * Complex64::new(0.0, kv[k]);
                }
                acc
            });
            ScalarField::from_spectral(grid, coeffs)
        })
        .collect();
    VectorField::new(comps).expect("row divergence components share a grid")
}

/// Derivative along `axis` with the Nyquist bin removed, so real samples
/// have real derivatives.
pub(crate) fn partial_nyquist_free(f: &ScalarField, axis: usize) -> ScalarField {
    let grid = *f.grid();
    let n = grid.points_per_axis();
    let coeffs: Vec<Complex64> = f
        .spectral()
        .iter()
        .enumerate()
        .map(|(l, c)| {
            let bin = grid.multi(l)[axis];
            if bin == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, wavenumber(&grid, axis, bin))
            }
        })
        .collect();
    ScalarField::from_spectral(grid, coeffs)
}

/// Divergence built from [`partial_nyquist_free`].
pub(crate) fn div_nyquist_free(v: &VectorField) -> ScalarField {
    let mut acc = ScalarField::zeros(*v.grid());
    for (a, c) in v.components().iter().enumerate() {
        acc = acc.add(&partial_nyquist_free(c, a)).expect("same grid");
    }
    acc
}

/// Row divergence built from [`partial_nyquist_free`].
pub(crate) fn div_matrix_rows_nyquist_free(f: &MatrixField) -> VectorField {
    let d = f.grid().dim();
    let comps = (0..d)
        .map(|j| {
            let mut acc = ScalarField::zeros(*f.grid());
            for k in 0..d {
                acc = acc.add(&partial_nyquist_free(f.entry(j, k), k)).expect("same grid");
            }
            acc
        })
        .collect();
    VectorField::new(comps).expect("same grid")
}

/// Spectral Laplacian, symbol `-(k . k)`.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    multiplier(f, |k| Complex64::new(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), 0.0))
}

/// Matrix of second derivatives `d_j d_k f`.
pub fn hessian(f: &ScalarField) -> MatrixField {
    let d = f.grid().dim();
    let entries = (0..d * d)
        .map(|e| multiplier(f, |k| Complex64::new(-k[e / d] * k[e % d], 0.0)))
        .collect();
    MatrixField::new(entries).expect("hessian entries share a grid")
}

/// Zero-mean solution of `Δu = f - mean(f)` together with the mean of `f`.
#[derive(Debug, Clone)]
pub struct InverseLaplacian {
    pub solution: ScalarField,
    pub mean: Complex64,
}

pub fn inv_laplacian(f: &ScalarField) -> InverseLaplacian {
    let mean = f.mean();
    let solution = multiplier(f, |k| {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-1.0 / k2, 0.0)
        }
    });
    InverseLaplacian { solution, mean }
}

/// Samples of the trigonometric interpolant of `f` on a grid `factor` times finer.
///
/// The interpolant uses the same one-sided frequency set as the derivatives, so
/// quadrature of products on the finer grid integrates interpolants exactly
/// whenever the total band of the product stays below the finer Nyquist limit.
pub(crate) fn upsample(f: &ScalarField, factor: usize) -> Result<ScalarField> {
    let grid = *f.grid();
    if factor == 1 {
        return Ok(f.clone());
    }
    let n = grid.points_per_axis();
    let fine = grid.refined(n * factor)?;
    let nf = fine.points_per_axis();
    let scale = (factor as f64).powi(grid.dim() as i32);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); fine.len()];
    for (l, c) in f.spectral().iter().enumerate() {
        let idx = grid.multi(l);
        let mut fidx = [0; 3];
        for a in 0..grid.dim() {
            let m = fft::signed_frequency(idx[a], n);
            fidx[a] = m.rem_euclid(nf as i64) as usize;
        }
        coeffs[fine.linear(fidx)] = c * scale;
    }
    Ok(ScalarField::from_spectral(fine, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(dim: usize, n: usize) -> Grid {
        Grid::new(dim, n, 1.0).unwrap()
    }

    #[test]
    fn gradient_of_single_mode() {
        let g = unit_grid(2, 16);
        let f = ScalarField::from_real_fn(g, |x| (2.0 * PI * x[0]).sin()).unwrap();
        let gf = grad(&f);
        for (l, v) in gf.component(0).values().iter().enumerate() {
            let x = g.position(g.multi(l));
            assert!((v.re - 2.0 * PI * (2.0 * PI * x[0]).cos()).abs() < 1e-11);
        }
        assert!(gf.component(1).max_norm() < 1e-12);
    }

    #[test]
    fn constant_has_zero_gradient_and_inverse() {
        let g = unit_grid(3, 8);
        let f = ScalarField::constant(g, Complex64::new(2.5, -1.0));
        assert!(grad(&f).max_norm() < 1e-13);
        let inv = inv_laplacian(&f);
        assert!(inv.solution.max_norm() < 1e-13);
        assert!((inv.mean - Complex64::new(2.5, -1.0)).norm() < 1e-13);
    }

    #[test]
    fn inverse_laplacian_of_eigenfunction() {
        let g = unit_grid(1, 32);
        let f = ScalarField::from_real_fn(g, |x| (2.0 * PI * x[0]).sin()).unwrap();
        let u = inv_laplacian(&f).solution;
        for (l, v) in u.values().iter().enumerate() {
            let x = g.position(g.multi(l))[0];
            assert!((v.re + (2.0 * PI * x).sin() / (4.0 * PI * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn nondivergence_of_a_skew_row_divergence() {
        let g = unit_grid(3, 8);
        let v = VectorField::from_fn(g, |x| {
            [
                Complex64::new((x[1] * 7.0).sin() + x[2], 0.2),
                Complex64::new(x[0] * x[2], (x[0] * 3.0).cos()),
                Complex64::new((x[1] - x[0]).powi(2), 0.0),
            ]
        })
        .unwrap();
        let f = curl_matrix(&v);
        assert!(f.is_skew());
        assert_eq!(f.skew_defect(), 0.0);
        let dd = div(&div_matrix_rows(&f));
        assert!(dd.max_norm() < 1e-10 * f.max_norm().max(1.0));
        assert!(curl_matrix(&grad(v.component(0))).max_norm() < 1e-10);
    }

    #[test]
    fn nyquist_free_derivatives_keep_real_fields_real() {
        let g = unit_grid(2, 8);
        let f = ScalarField::from_real_fn(g, |x| (if x[0] < 0.3 { 1.0 } else { -0.5 }) + x[1]).unwrap();
        assert!(grad(&f).component(0).max_imag() > 1e-3);
        assert!(partial_nyquist_free(&f, 0).max_imag() < 1e-14);
        let v = VectorField::new(vec![f.clone(), f.scale((-2.0).into())]).unwrap();
        let skew = curl_matrix(&v);
        assert!(div_nyquist_free(&div_matrix_rows_nyquist_free(&skew)).max_norm() < 1e-12);
    }

    #[test]
    fn upsampled_samples_match_interpolant() {
        let g = unit_grid(1, 16);
        let f = ScalarField::from_real_fn(g, |x| (2.0 * PI * 3.0 * x[0]).cos() + 0.5).unwrap();
        let fine = upsample(&f, 2).unwrap();
        for (l, v) in fine.values().iter().enumerate() {
            let x = l as f64 / 32.0;
            assert!((v.re - ((2.0 * PI * 3.0 * x).cos() + 0.5)).abs() < 1e-13);
        }
    }
}
