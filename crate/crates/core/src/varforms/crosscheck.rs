use serde::Serialize;

use super::commutator_constant_with;
use crate::eigen::EigenOptions;
use crate::error::Result;
use crate::field::VectorField;
use crate::hodge::hodge_decompose;
use crate::regnorms::{bmo_norm_matrix, trace_norm_with};

/// Default comparability window `R`: ratios in `[1/R, R]` count as comparable.
pub const DEFAULT_WINDOW: f64 = 50.0;

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub k_direct: f64,
    pub k_decomp: f64,
    /// Dyadic BMO norm of the skew part `F`.
    pub bmo: f64,
    /// Trace norm of `|grad f|^2` for the irrotational part `grad f`.
    pub trace: f64,
    pub ratio: f64,
    pub window: f64,
    pub within_window: bool,
    pub low_mode_dominated: bool,
}

/// Compares the commutator constant of `d` with the size of its Hodge parts.
/// The torus mean of `d` is not part of either estimate.
pub fn criterion_crosscheck(d: &VectorField, window: f64, opts: &EigenOptions) -> Result<CrosscheckReport> {
    let d = d.re();
    let k_direct = commutator_constant_with(&d, opts)?.constant;
    let parts = hodge_decompose(&d);
    let bmo = bmo_norm_matrix(&parts.skew.re()).value;
    let trace = trace_norm_with(&parts.irrotational.norm_sqr(), &[], opts)?.value;
    let k_decomp = bmo + trace;
    let tiny = 1e-14 * d.max_norm().max(f64::MIN_POSITIVE);
    let ratio = if k_direct <= tiny && k_decomp <= tiny {
        1.0
    } else if k_decomp <= tiny {
        f64::INFINITY
    } else {
        k_direct / k_decomp
    };
    Ok(CrosscheckReport {
        k_direct,
        k_decomp,
        bmo,
        trace,
        ratio,
        window,
        within_window: ratio >= 1.0 / window && ratio <= window,
        low_mode_dominated: parts.is_low_mode_dominated(),
    })
}
