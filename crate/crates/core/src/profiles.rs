//! Radial coefficient profiles centered at a point of the box, regularized at
//! the grid scale by `r -> max(r, h/2)`, and a one-dimensional radial oracle
//! for the Hardy constant.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField, VectorField};

/// Periodic distance to `center`, floored at half the smallest spacing.
pub fn regularized_distance(grid: &Grid, center: [f64; 3]) -> Vec<f64> {
    let floor = 0.5 * grid.min_spacing();
    (0..grid.len())
        .map(|l| {
            let off = grid.periodic_offset(grid.position(grid.multi(l)), center);
            off.iter().map(|o| o * o).sum::<f64>().sqrt().max(floor)
        })
        .collect()
}

fn real_field(grid: &Grid, values: Vec<f64>) -> Result<ScalarField> {
    ScalarField::from_real(*grid, &values)
}

/// `gamma |x - x0|^-2`.
pub fn hardy(grid: &Grid, gamma: f64, center: [f64; 3]) -> Result<ScalarField> {
    power(grid, center, -2.0).map(|f| f.scale(Complex64::new(gamma, 0.0)))
}

/// `|x - x0|^exponent`.
pub fn power(grid: &Grid, center: [f64; 3], exponent: f64) -> Result<ScalarField> {
    let r = regularized_distance(grid, center);
    real_field(grid, r.iter().map(|r| r.powf(exponent)).collect())
}

/// `log |x - x0|`.
pub fn log_distance(grid: &Grid, center: [f64; 3]) -> Result<ScalarField> {
    let r = regularized_distance(grid, center);
    real_field(grid, r.iter().map(|r| r.ln()).collect())
}

/// `scale (x - x0) |x - x0|^-2`, the field whose Riccati defect is the
/// Hardy potential. The singular node gets the value zero.
pub fn hardy_vector(grid: &Grid, scale: f64, center: [f64; 3]) -> Result<VectorField> {
    let d = grid.dim();
    let comps = (0..d)
        .map(|a| {
            let vals = (0..grid.len())
                .map(|l| {
                    let off = grid.periodic_offset(grid.position(grid.multi(l)), center);
                    let r2: f64 = off.iter().map(|o| o * o).sum();
                    if r2 == 0.0 {
                        0.0
                    } else {
                        scale * off[a] / r2
                    }
                })
                .collect();
            real_field(grid, vals)
        })
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(comps)
}

/// `(-d2 g, d1 g)` for a two-dimensional scalar `g`.
pub fn perp_gradient(g: &ScalarField) -> Result<VectorField> {
    if g.grid().dim() != 2 {
        return Err(Error::Dimension {
            expected: "dimension 2".into(),
            found: g.grid().dim(),
        });
    }
    let grad = crate::field::grad(g);
    VectorField::new(vec![
        grad.component(1).scale(Complex64::new(-1.0, 0.0)),
        grad.component(0).clone(),
    ])
}

/// Best constant `gamma*` in `gamma int |u|^2 |x|^-2 <= int |grad u|^2` for
/// radial `u` in dimension `dim >= 3`, from the one-dimensional radial form
/// `int u'^2 r^(n-1) dr` against `int u^2 r^(n-3) dr` on a geometric mesh
/// over `[r_min, r_max]` with `u(r_max) = 0`. The threshold is located by
/// Sturm counts of the tridiagonal pencil.
pub fn hardy_threshold_radial(dim: usize, r_min: f64, r_max: f64, points: usize) -> Result<f64> {
    if dim < 3 || r_min <= 0.0 || r_max <= r_min || points < 8 {
        return Err(Error::InvalidParameter(
            "radial Hardy oracle needs dim >= 3, 0 < r_min < r_max and >= 8 points".into(),
        ));
    }
    let q = (r_max / r_min).powf(1.0 / points as f64);
    let r: Vec<f64> = (0..=points).map(|k| r_min * q.powi(k as i32)).collect();
    let n = dim as i32;
    // Unknowns at r[0..points], u(r[points]) = 0.
    let m = points;
    let mut diag_k = vec![0.0; m];
    let mut off_k = vec![0.0; m.saturating_sub(1)];
    let mut mass = vec![0.0; m];
    for e in 0..points {
        let dr = r[e + 1] - r[e];
        let mid = 0.5 * (r[e] + r[e + 1]);
        let w = mid.powi(n - 1) / dr;
        diag_k[e] += w;
        if e + 1 < m {
            diag_k[e + 1] += w;
            off_k[e] -= w;
        }
        let half = 0.5 * dr;
        mass[e] += half * r[e].powi(n - 3);
        if e + 1 < m {
            mass[e + 1] += half * r[e + 1].powi(n - 3);
        }
    }
    let negative_count = |gamma: f64| -> usize {
        let mut count = 0;
        let mut d_prev = 0.0;
        for i in 0..m {
            let a = diag_k[i] - gamma * mass[i];
            let d = if i == 0 {
                a
            } else {
                let b = off_k[i - 1];
                a - b * b / d_prev
            };
            let d = if d == 0.0 { -f64::MIN_POSITIVE } else { d };
            if d < 0.0 {
                count += 1;
            }
            d_prev = d;
        }
        count
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while negative_count(hi) == 0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if negative_count(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{div, grad};

    #[test]
    fn radial_oracle_brackets_the_hardy_constant() {
        let g3 = hardy_threshold_radial(3, 1e-12, 1.0, 4000).unwrap();
        assert!((g3 - 0.25).abs() < 0.02, "{g3}");
        let g5 = hardy_threshold_radial(5, 1e-12, 1.0, 4000).unwrap();
        assert!((g5 - 2.25).abs() < 0.05, "{g5}");
    }

    #[test]
    fn perp_gradient_is_divergence_free() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let f = log_distance(&g, g.inner_center()).unwrap();
        let v = perp_gradient(&f).unwrap();
        assert!(div(&v).max_norm() < 1e-9 * v.max_norm());
        assert!(grad(&f).max_norm() > 0.0);
    }

    #[test]
    fn hardy_profile_is_regularized() {
        let g = Grid::new(3, 16, 1.0).unwrap();
        let c = g.inner_center();
        let h = hardy(&g, 0.25, c).unwrap();
        let h0 = g.spacing(0);
        assert!((h.max_norm() - 0.25 / (0.25 * h0 * h0)).abs() < 1e-9 * h.max_norm());
    }
}
