//! Size functionals: dyadic BMO, Morrey growth, Hölder–Lipschitz seminorms
//! and the trace-inequality norm of a measure.

mod bmo;
mod lip;
mod morrey;
mod trace;

use serde::Serialize;

pub use bmo::{bmo_norm, bmo_norm_matrix};
pub use lip::lip_seminorm;
pub use morrey::morrey_constant;
pub use trace::{trace_norm, trace_norm_with};

use crate::error::Result;
use crate::field::{Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NormKind {
    /// Mean oscillation over the dyadic lattice.
    Bmo,
    Morrey { s: f64 },
    Lip { alpha: f64 },
    Trace,
}

/// Where the supremum was attained, as grid indices and physical sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    None,
    /// Dyadic cube at `level` (side `points_per_axis / 2^level` cells)
    /// with lowest corner `origin`; `entry` is the matrix entry, if any.
    Cube {
        level: usize,
        origin: Vec<usize>,
        entry: Option<(usize, usize)>,
    },
    Ball { center: Vec<usize>, radius: f64 },
    Pair { x: Vec<usize>, y: Vec<usize> },
    /// Extremal eigenvector of the seeded eigen-solver.
    Eigenvector {
        seed: u64,
        iterations: usize,
        residual: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub kind: NormKind,
    pub value: f64,
    pub witness: Witness,
    /// `(points_per_axis, value)` per grid level.
    pub refinement_trace: Vec<(usize, f64)>,
    #[serde(skip)]
    pub witness_field: Option<ScalarField>,
}

impl NormReport {
    pub(crate) fn new(grid: &Grid, kind: NormKind, value: f64, witness: Witness) -> Self {
        Self {
            kind,
            value,
            witness,
            refinement_trace: vec![(grid.points_per_axis(), value)],
            witness_field: None,
        }
    }

    /// Relative change over the last two levels of the trace.
    pub fn last_relative_change(&self) -> Option<f64> {
        let n = self.refinement_trace.len();
        if n < 2 {
            return None;
        }
        let (a, b) = (self.refinement_trace[n - 2].1, self.refinement_trace[n - 1].1);
        Some(if a == 0.0 && b == 0.0 { 0.0 } else { (b - a).abs() / a.abs().max(b.abs()) })
    }

    /// Value changes less than 10% across the last two refinements.
    pub fn admissible_at_desk_scale(&self) -> Option<bool> {
        self.last_relative_change().map(|c| c < 0.1)
    }
}

/// Evaluates `compute` on each grid of a sweep and returns the report of the
/// finest one, carrying the full trace.
pub fn refinement_sweep<F>(grids: &[Grid], mut compute: F) -> Result<NormReport>
where
    F: FnMut(&Grid) -> Result<NormReport>,
{
    let mut trace = Vec::with_capacity(grids.len());
    let mut last = None;
    for g in grids {
        let r = compute(g)?;
        trace.push((g.points_per_axis(), r.value));
        last = Some(r);
    }
    let mut report = last.ok_or_else(|| crate::Error::InvalidParameter("empty refinement sweep".into()))?;
    report.refinement_trace = trace;
    Ok(report)
}
