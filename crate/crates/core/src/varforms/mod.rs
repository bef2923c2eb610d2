//! Variational constants of second-order forms on the discrete Dirichlet
//! space: form bounds, accretivity, commutator constants, subordination
//! profiles and magnetic forms.

mod accretivity;
mod commutator;
mod crosscheck;
mod formbound;
mod magnetic;
mod subordination;

use serde::Serialize;

pub(crate) use accretivity::{principal_form, real_potential};
pub use accretivity::{accretivity_min, accretivity_min_with, schrodinger_positivity, schrodinger_positivity_with, Direction};
pub use commutator::{commutator_constant, commutator_constant_with};
pub use crosscheck::{criterion_crosscheck, CrosscheckReport, DEFAULT_WINDOW};
pub use formbound::{form_bound_constant, form_bound_constant_with};
pub use magnetic::{magnetic_coefficients, magnetic_comparability, magnetic_form, ComparabilityReport};
pub use subordination::{subordination_profile, SubordinationMode, SubordinationReport};

use crate::field::ScalarField;

/// Band around zero inside which a minimum counts as marginal.
pub const MARGINAL_BAND: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accretive,
    Marginal,
    Not,
}

impl Verdict {
    pub fn from_minimum(min: f64) -> Self {
        if min > MARGINAL_BAND {
            Verdict::Accretive
        } else if min >= -MARGINAL_BAND {
            Verdict::Marginal
        } else {
            Verdict::Not
        }
    }

    /// Nonnegative up to the marginal band.
    pub fn is_accretive(self) -> bool {
        !matches!(self, Verdict::Not)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FormBoundReport {
    pub constant: f64,
    pub iterations: usize,
    pub residual: f64,
    pub mass_term: bool,
    /// `|C(u, u)| / (||grad u||^2)` at the witness, for antisymmetric forms.
    pub antisymmetry_defect: Option<f64>,
    pub refinement_trace: Vec<(usize, f64)>,
    #[serde(skip)]
    pub witness_u: Option<ScalarField>,
    #[serde(skip)]
    pub witness_v: Option<ScalarField>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AccretivityReport {
    /// `inf Re<-Lu, u> / ||grad u||^2`.
    pub min_rayleigh: f64,
    pub verdict: Verdict,
    /// Best `1 - eps^2` in `<sigma h, h> <= (1 - eps^2) <P grad h, grad h>`.
    pub upper_eps: Option<f64>,
    /// Best `K >= 0` in `<sigma h, h> >= -K <P grad h, grad h>`.
    pub lower_k: Option<f64>,
    /// Pointwise direction where `P` fails to be nonnegative.
    pub direction: Option<Direction>,
    pub iterations: usize,
    pub residual: f64,
    pub refinement_trace: Vec<(usize, f64)>,
    #[serde(skip)]
    pub witness_u: Option<ScalarField>,
}

impl AccretivityReport {
    /// `eps` of the upper bound, when `upper_eps <= 1`.
    pub fn epsilon(&self) -> Option<f64> {
        self.upper_eps.filter(|u| *u <= 1.0).map(|u| (1.0 - u).sqrt())
    }
}
