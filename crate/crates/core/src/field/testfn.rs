use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fft, Grid, ScalarField};
use crate::error::{Error, Result};

/// Gaussian window width as a fraction of the inner half-width. At the edge
/// of the inner box the window is `exp(-32) ~ 1.3e-14` of its peak.
const WINDOW_WIDTH: f64 = 1.0 / 8.0;

/// Parameters of a seeded test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    pub seed: u64,
    pub band_limit: usize,
    pub real_valued: bool,
}

/// Complex smooth function concentrated in the inner sub-box: a Gaussian
/// window times `1 + q/2`, with `q` a seeded random trigonometric polynomial
/// of band `band_limit` and unit maximum modulus on the grid.
pub fn make_test_function(grid: &Grid, seed: u64, band_limit: usize) -> Result<ScalarField> {
    make_test_function_with(
        grid,
        &TestFunctionSpec {
            seed,
            band_limit,
            real_valued: false,
        },
    )
}

impl TestFunctionSpec {
    pub fn build(&self, grid: &Grid) -> Result<ScalarField> {
        make_test_function_with(grid, self)
    }
}

pub fn make_test_function_with(grid: &Grid, spec: &TestFunctionSpec) -> Result<ScalarField> {
    let q = random_band_limited(grid, spec.seed, spec.band_limit, spec.real_valued)?;
    let (lo, hi) = grid.inner_bounds();
    let center = grid.inner_center();
    let values = q
        .values()
        .iter()
        .enumerate()
        .map(|(l, q)| {
            let x = grid.position(grid.multi(l));
            let off = grid.periodic_offset(x, center);
            let mut window = 1.0;
            for (a, o) in off.iter().enumerate().take(grid.dim()) {
                let tau = WINDOW_WIDTH * 0.5 * (hi - lo) as f64 * grid.spacing(a);
                window *= (-0.5 * (o / tau).powi(2)).exp();
            }
            (Complex64::new(1.0, 0.0) + q * 0.5) * window
        })
        .collect();
    ScalarField::new(*grid, values)
}

/// Seeded random trigonometric polynomial with frequencies `|m_a| <= band`,
/// scaled to unit maximum modulus on the grid.
pub fn random_band_limited(
    grid: &Grid,
    seed: u64,
    band: usize,
    real_valued: bool,
) -> Result<ScalarField> {
    let n = grid.points_per_axis();
    if band >= n / 2 {
        return Err(Error::BandLimit { band, half: n / 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let b = band as i64;
    let width = (2 * b + 1) as usize;
    for l in 0..width.pow(grid.dim() as u32) {
        let mut rest = l;
        let mut idx = [0; 3];
        for slot in idx.iter_mut().take(grid.dim()) {
            let m = (rest % width) as i64 - b;
            rest /= width;
            *slot = m.rem_euclid(n as i64) as usize;
        }
        let re: f64 = rng.random_range(-1.0..1.0);
        let im: f64 = rng.random_range(-1.0..1.0);
        coeffs[grid.linear(idx)] = Complex64::new(re, im);
    }
    fft::inverse(&mut coeffs, grid.dim(), n);
    if real_valued {
        for c in coeffs.iter_mut() {
            c.im = 0.0;
        }
    }
    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak > 0.0 {
        for c in coeffs.iter_mut() {
            *c /= peak;
        }
    }
    ScalarField::new(*grid, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::grad;

    #[test]
    fn concentrated_in_inner_box() {
        for dim in 1..=3 {
            let g = Grid::new(dim, 32, 1.0).unwrap();
            let u = make_test_function(&g, 7, 3).unwrap();
            let peak = u.max_norm();
            for (l, v) in u.values().iter().enumerate() {
                if !g.is_in_closed_inner_box(g.multi(l)) {
                    assert!(v.norm() < 1e-12 * peak);
                }
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let a = make_test_function(&g, 11, 4).unwrap();
        let b = make_test_function(&g, 11, 4).unwrap();
        let c = make_test_function(&g, 12, 4).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn rejects_band_at_nyquist() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        assert!(matches!(
            make_test_function(&g, 0, 8),
            Err(Error::BandLimit { band: 8, half: 8 })
        ));
    }

    #[test]
    fn dirichlet_norms_positive() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        for seed in 1..=100 {
            let u = make_test_function(&g, seed, 5).unwrap();
            let e = grad(&u).l2_norm();
            assert!(e.is_finite() && e > 0.0, "seed {seed}");
        }
    }
}
