use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed scenario, unknown family or analysis.
    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Core(#[from] formlab::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn scenario(msg: impl Into<String>) -> Self {
        Self::Scenario(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Scenario(_) => 2,
            Self::Core(formlab::Error::NoConvergence { .. }) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
