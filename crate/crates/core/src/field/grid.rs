use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multi-index into a grid; unused trailing axes are zero.
pub type Index3 = [usize; 3];

/// Uniform periodic box in one to three dimensions.
///
/// Samples sit at `x_a = i_a * h_a` for `i_a in 0..points_per_axis`. Linear
/// indices are row-major with the last axis varying fastest. The inner
/// sub-box is the centered block of side `inner_fraction * side_length`,
/// snapped to grid nodes; compactly supported test functions live there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points: usize,
    side: [f64; 3],
    inner_fraction: f64,
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize, side_length: f64) -> Result<Self> {
        Self::with_sides(dim, points_per_axis, &vec![side_length; dim])
    }

    pub fn with_sides(dim: usize, points_per_axis: usize, sides: &[f64]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis {points_per_axis} must be a power of two >= 8"
            )));
        }
        if sides.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} side lengths, got {}",
                sides.len()
            )));
        }
        let mut side = [0.0; 3];
        for (a, &s) in sides.iter().enumerate() {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidGrid(format!("side length {s} must be positive")));
            }
            side[a] = s;
        }
        Ok(Self {
            dim,
            points: points_per_axis,
            side,
            inner_fraction: 0.5,
        })
    }

    pub fn with_inner_fraction(mut self, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "inner_support_fraction {fraction} not in (0, 1]"
            )));
        }
        self.inner_fraction = fraction;
        let (lo, hi) = self.inner_bounds();
        if hi < lo + 2 {
            return Err(Error::InvalidGrid(
                "inner sub-box holds no interior grid node".into(),
            ));
        }
        Ok(self)
    }

    /// Same box and inner fraction, different resolution.
    pub fn refined(&self, points_per_axis: usize) -> Result<Self> {
        Self::with_sides(self.dim, points_per_axis, self.sides())?
            .with_inner_fraction(self.inner_fraction)
    }

    /// Same mesh width and inner fraction, box scaled by `factor` (a power of two).
    pub fn scaled_box(&self, factor: usize) -> Result<Self> {
        let sides: Vec<f64> = self.sides().iter().map(|s| s * factor as f64).collect();
        Self::with_sides(self.dim, self.points * factor, &sides)?
            .with_inner_fraction(self.inner_fraction)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sides(&self) -> &[f64] {
        &self.side[..self.dim]
    }

    #[inline]
    pub fn side_length(&self, axis: usize) -> f64 {
        self.side[axis]
    }

    #[inline]
    pub fn spacing(&self, axis: usize) -> f64 {
        self.side[axis] / self.points as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim)
            .map(|a| self.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Quadrature weight of one sample.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.sides().iter().product()
    }

    pub fn inner_fraction(&self) -> f64 {
        self.inner_fraction
    }

    /// Node indices `(lo, hi)` of the closed inner sub-box along every axis.
    /// Test functions vanish at `lo` and `hi`; `lo+1..hi` are free.
    pub fn inner_bounds(&self) -> (usize, usize) {
        let n = self.points as f64;
        let f = self.inner_fraction;
        let lo = (n * (1.0 - f) / 2.0).round() as usize;
        let hi = ((n * (1.0 + f) / 2.0).round() as usize).min(self.points);
        (lo, hi)
    }

    /// Physical center of the inner sub-box.
    pub fn inner_center(&self) -> [f64; 3] {
        let (lo, hi) = self.inner_bounds();
        let mut c = [0.0; 3];
        for (a, ca) in c.iter_mut().enumerate().take(self.dim) {
            *ca = 0.5 * (lo + hi) as f64 * self.spacing(a);
        }
        c
    }

    #[inline]
    pub fn linear(&self, idx: Index3) -> usize {
        let mut l = 0;
        for &i in idx.iter().take(self.dim) {
            l = l * self.points + i;
        }
        l
    }

    #[inline]
    pub fn multi(&self, mut linear: usize) -> Index3 {
        let mut idx = [0; 3];
        for a in (0..self.dim).rev() {
            idx[a] = linear % self.points;
            linear /= self.points;
        }
        idx
    }

    #[inline]
    pub fn position(&self, idx: Index3) -> [f64; 3] {
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = idx[a] as f64 * self.spacing(a);
        }
        x
    }

    /// Signed minimum-image displacement `x - center` on the torus.
    pub fn periodic_offset(&self, x: [f64; 3], center: [f64; 3]) -> [f64; 3] {
        let mut d = [0.0; 3];
        for a in 0..self.dim {
            let l = self.side[a];
            let mut v = x[a] - center[a];
            v -= l * (v / l).round();
            d[a] = v;
        }
        d
    }

    /// Neighbour index along `axis` with periodic wrap.
    #[inline]
    pub fn shifted(&self, idx: Index3, axis: usize, step: isize) -> Index3 {
        let n = self.points as isize;
        let mut out = idx;
        out[axis] = ((idx[axis] as isize + step).rem_euclid(n)) as usize;
        out
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && self.sides() == other.sides()
            && self.inner_fraction == other.inner_fraction
    }

    pub fn is_inner_node(&self, idx: Index3) -> bool {
        let (lo, hi) = self.inner_bounds();
        (0..self.dim).all(|a| idx[a] > lo && idx[a] < hi)
    }

    pub fn is_in_closed_inner_box(&self, idx: Index3) -> bool {
        let (lo, hi) = self.inner_bounds();
        (0..self.dim).all(|a| idx[a] >= lo && idx[a] <= hi)
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::new(4, 16, 1.0).is_err());
        assert!(Grid::new(2, 12, 1.0).is_err());
        assert!(Grid::new(2, 4, 1.0).is_err());
        assert!(Grid::new(1, 16, -1.0).is_err());
        assert!(Grid::new(2, 16, 1.0).unwrap().with_inner_fraction(0.0).is_err());
        assert!(Grid::new(2, 16, 1.0).unwrap().with_inner_fraction(1.5).is_err());
    }

    #[test]
    fn index_roundtrip_and_counts() {
        let g = Grid::new(3, 8, 2.0).unwrap();
        assert_eq!(g.len(), 512);
        assert!((g.spacing(1) - 0.25).abs() < 1e-15);
        for l in [0, 1, 7, 8, 63, 64, 511] {
            assert_eq!(g.linear(g.multi(l)), l);
        }
    }

    #[test]
    fn inner_box_is_centered() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        assert_eq!(g.inner_bounds(), (16, 48));
        assert!((g.inner_center()[0] - 0.5).abs() < 1e-15);
        let full = g.with_inner_fraction(1.0).unwrap();
        assert_eq!(full.inner_bounds(), (0, 64));
    }
}
