use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discrete::PeriodicSpace;
use crate::eigen::{largest, EigenOptions};
use crate::error::{Error, Result};
use crate::field::{grad, random_band_limited, ScalarField, VectorField};
use crate::hodge::potential_field;
use crate::reduction::{sesquilinear, CoefficientSet, PointMass};
use crate::regnorms::{bmo_norm, lip_seminorm, morrey_constant, NormReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SubordinationMode {
    /// `C(eps)` in `|<q u, u>| <= eps ||grad u||^2 + C(eps) ||u||^2`.
    Infinitesimal,
    /// As `Infinitesimal`, plus the fit `C(eps) ~ C eps^-beta`.
    Trudinger,
    /// `|<q u, u>| <= C ||grad u||^2p ||u||_2^(2 - 2p)`.
    PSubordination { p: f64 },
    /// As `PSubordination` with `||u||_1` in place of `||u||_2`.
    Nash { p: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct SubordinationReport {
    pub mode: SubordinationMode,
    pub epsilons: Vec<f64>,
    pub constants: Vec<f64>,
    pub fitted_beta: Option<f64>,
    pub p_constant: Option<f64>,
    /// Size of `grad Delta^-1 q` in the space matching `p`:
    /// BMO at `p = 1/2`, `Lip(1 - 2p)` below, Morrey `r^(n + 2 - 4p)` above.
    pub regime_norm: Option<NormReport>,
}

/// Dilations and seeds of the test-function sweep for the `p` modes.
const SWEEP_SEEDS: u64 = 8;

pub fn subordination_profile(
    q: &ScalarField,
    atoms: &[PointMass],
    mode: SubordinationMode,
    epsilons: &[f64],
    opts: &EigenOptions,
) -> Result<SubordinationReport> {
    match mode {
        SubordinationMode::Infinitesimal | SubordinationMode::Trudinger => {
            if epsilons.is_empty() {
                return Err(Error::InvalidParameter("empty epsilon list".into()));
            }
            if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0)) {
                return Err(Error::InvalidParameter(format!("epsilon must be positive, got {e}")));
            }
            let constants = epsilons
                .iter()
                .map(|&e| infinitesimal_constant(q, atoms, e, opts))
                .collect::<Result<Vec<_>>>()?;
            let fitted_beta = (mode == SubordinationMode::Trudinger).then(|| fit_beta(epsilons, &constants));
            Ok(SubordinationReport {
                mode,
                epsilons: epsilons.to_vec(),
                constants,
                fitted_beta,
                p_constant: None,
                regime_norm: None,
            })
        }
        SubordinationMode::PSubordination { p } | SubordinationMode::Nash { p } => {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
            }
            let l1 = matches!(mode, SubordinationMode::Nash { .. });
            Ok(SubordinationReport {
                mode,
                epsilons: Vec::new(),
                constants: Vec::new(),
                fitted_beta: None,
                p_constant: Some(p_constant(q, atoms, p, l1)?),
                regime_norm: Some(regime_norm(q, p)?),
            })
        }
    }
}

/// `max(0, max_theta lambda_max(Re(e^{i theta} Q) - eps K, dV I))` on the
/// periodic difference space, with `theta` over the four quarter turns.
fn infinitesimal_constant(q: &ScalarField, atoms: &[PointMass], eps: f64, opts: &EigenOptions) -> Result<f64> {
    let space = PeriodicSpace::new(q.grid());
    let pot = space.potential(q, atoms)?;
    let vol = space.cell_volume();
    let peak = pot.diag.iter().map(|v| v.norm()).fold(0.0, f64::max) / vol;
    let shift = peak.max(1.0 / eps);
    let mut best: f64 = 0.0;
    for turn in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)] {
        let diag: Vec<f64> = pot.diag.iter().map(|d| (turn * d).re).collect();
        if diag.iter().all(|d| *d <= 0.0) {
            continue;
        }
        let a = |x: &[Complex64]| -> Vec<Complex64> {
            space
                .laplacian(x)
                .iter()
                .zip(x)
                .zip(&diag)
                .map(|((k, v), d)| v * *d - k * eps)
                .collect()
        };
        let m = |x: &[Complex64]| -> Vec<Complex64> { x.iter().map(|v| v * vol).collect() };
        let t = |x: &[Complex64]| space.solve(x, shift / eps).iter().map(|v| v / eps).collect::<Vec<_>>();
        best = best.max(largest(&a, &m, &t, space.len(), &opts.real())?.value);
    }
    Ok(best)
}

/// Least-squares slope of `log C` against `-log eps` over the positive constants.
fn fit_beta(epsilons: &[f64], constants: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = epsilons
        .iter()
        .zip(constants)
        .filter(|(_, c)| **c > 0.0)
        .map(|(e, c)| (-e.ln(), c.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        (sxy / sxx).max(0.0)
    }
}

/// Largest ratio over Gaussian bumps of dyadic widths and seeded centers,
/// modulated by seeded band-limited factors.
fn p_constant(q: &ScalarField, atoms: &[PointMass], p: f64, l1: bool) -> Result<f64> {
    let grid = *q.grid();
    let cs = CoefficientSet::potential(q.clone()).with_point_masses(atoms.to_vec())?;
    let (lo, hi) = grid.inner_bounds();
    let center = grid.inner_center();
    let half = 0.5 * (hi - lo) as f64 * grid.min_spacing();
    let mut best: f64 = 0.0;
    let mut width = half / 4.0;
    while width >= 2.0 * grid.min_spacing() {
        for seed in 0..SWEEP_SEEDS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c = center;
            for ca in c.iter_mut().take(grid.dim()) {
                *ca += rng.random_range(-0.25..0.25) * half;
            }
            let modulation = random_band_limited(&grid, seed, 2, false)?;
            let u = ScalarField::from_fn(grid, |x| {
                let off = grid.periodic_offset(x, c);
                let r2: f64 = off.iter().map(|o| o * o).sum();
                Complex64::new((-0.5 * r2 / (width * width)).exp(), 0.0)
            })?
            .zip_map(&modulation, |w, m| w * (Complex64::new(1.0, 0.0) + m * 0.5))?;
            let form = sesquilinear(&cs, &u, &u)?.norm();
            let energy = grad(&u).l2_norm().powi(2);
            let size = if l1 { u.l1_norm() } else { u.l2_norm() };
            let denom = energy.powf(p) * size.powf(2.0 * (1.0 - p));
            if denom > 0.0 {
                best = best.max(form / denom);
            }
        }
        width /= 2.0;
    }
    Ok(best)
}

fn regime_norm(q: &ScalarField, p: f64) -> Result<NormReport> {
    let gamma: VectorField = potential_field(q).field.re();
    let n = q.grid().dim() as f64;
    if (p - 0.5).abs() < 1e-12 {
        let reports: Vec<NormReport> = gamma.components().iter().map(bmo_norm).collect();
        Ok(max_report(reports))
    } else if p < 0.5 {
        let reports = gamma
            .components()
            .iter()
            .map(|c| lip_seminorm(c, 1.0 - 2.0 * p))
            .collect::<Result<Vec<_>>>()?;
        Ok(max_report(reports))
    } else {
        morrey_constant(&gamma, n + 2.0 - 4.0 * p)
    }
}

fn max_report(reports: Vec<NormReport>) -> NormReport {
    reports
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one component")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;

    #[test]
    fn constant_potential_is_flat() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let q = ScalarField::constant(g, Complex64::new(-2.5, 0.0));
        let r = subordination_profile(&q, &[], SubordinationMode::Trudinger, &[0.01, 0.1, 0.5], &EigenOptions::default()).unwrap();
        for c in &r.constants {
            assert!((c - 2.5).abs() < 1e-10, "{c}");
        }
        assert!(r.fitted_beta.unwrap() < 1e-6);
    }

    #[test]
    fn empty_epsilons_rejected() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let q = ScalarField::zeros(g);
        assert!(subordination_profile(&q, &[], SubordinationMode::Infinitesimal, &[], &EigenOptions::default()).is_err());
    }

    #[test]
    fn beta_fit_recovers_power_law() {
        let eps = [1e-3, 1e-2, 1e-1];
        let c: Vec<f64> = eps.iter().map(|e| 0.25 / e).collect();
        assert!((fit_beta(&eps, &c) - 1.0).abs() < 1e-12);
    }
}
