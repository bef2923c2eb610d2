use num_complex::Complex64;

use super::{NormKind, NormReport, Witness};
use crate::error::{Error, Result};
use crate::field::{fft, VectorField};

/// `sup r^-s int_{B_r(x)} |g|^2` over grid-centered balls, with radii
/// `2h, 4h, ...` up to half the box side.
pub fn morrey_constant(g: &VectorField, s: f64) -> Result<NormReport> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("Morrey exponent must be positive, got {s}")));
    }
    let grid = *g.grid();
    let (d, n) = (grid.dim(), grid.points_per_axis());
    let vol = grid.cell_volume();
    let mut density: Vec<Complex64> = g
        .norm_sqr()
        .values()
        .iter()
        .map(|v| Complex64::new(v.re, 0.0))
        .collect();
    fft::forward(&mut density, d, n);
    let origin = [0.0; 3];
    let half_side = (0..d).map(|a| grid.side_length(a)).fold(f64::INFINITY, f64::min) / 2.0;
    let mut best = (0.0, vec![0; d], 0.0);
    let mut r = 2.0 * grid.min_spacing();
    while r <= half_side * (1.0 + 1e-12) {
        let mut kernel: Vec<Complex64> = (0..grid.len())
            .map(|l| {
                let off = grid.periodic_offset(grid.position(grid.multi(l)), origin);
                let r2: f64 = off.iter().map(|o| o * o).sum();
                Complex64::new(if r2 < r * r { 1.0 } else { 0.0 }, 0.0)
            })
            .collect();
        fft::forward(&mut kernel, d, n);
        let mut conv: Vec<Complex64> = kernel.iter().zip(&density).map(|(a, b)| a * b).collect();
        fft::inverse(&mut conv, d, n);
        let scale = vol / r.powf(s);
        for (l, c) in conv.iter().enumerate() {
            let v = c.re.max(0.0) * scale;
            if v > best.0 {
                best = (v, grid.multi(l)[..d].to_vec(), r);
            }
        }
        r *= 2.0;
    }
    Ok(NormReport::new(
        &grid,
        NormKind::Morrey { s },
        best.0,
        Witness::Ball {
            center: best.1,
            radius: best.2,
        },
    ))
}
