use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("wrong dimension: expected {expected}, found {found}")]
    Dimension { expected: String, found: usize },

    #[error("band limit {band} must be below points_per_axis/2 = {half}")]
    BandLimit { band: usize, half: usize },

    #[error("matrix field is not skew-symmetric (max |F + F^T| = {0:e})")]
    NotSkew(f64),

    #[error("matrix field is not symmetric (max |P - P^T| = {0:e})")]
    NotSymmetric(f64),

    #[error("operation requires a {expected}-form coefficient set")]
    FormTag { expected: &'static str },

    #[error("point masses are only supported in one dimension")]
    PointMassDimension,

    #[error("negative density: min value {min:e} below tolerance")]
    NegativeDensity { min: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigen-solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("form is indefinite: minimum {min:e}, negative direction peaks at grid index {witness_peak:?}")]
    Indefinite { min: f64, witness_peak: Vec<usize> },

    #[error("form is marginal: minimum {min:e} inside the margin {margin:e}")]
    Marginal { min: f64, margin: f64 },

    #[error("field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
