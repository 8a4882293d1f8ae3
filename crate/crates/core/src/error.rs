use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A caller-side precondition did not hold (e.g. an operand exceeds magnitude 1).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A runtime-verified bound failed. This always indicates a bug, never bad input.
    #[error("postcondition violated: {0}")]
    PostconditionViolation(String),

    #[error("scale exhausted: {0}")]
    ScaleExhausted(String),

    #[error("density increment not found: {0}")]
    IncrementNotFound(String),

    #[error(
        "dichotomy failed after {attempts} rounding attempts (target {target:e}, best {best:e})"
    )]
    DichotomyFailed {
        attempts: usize,
        target: f64,
        best: f64,
    },

    #[error("sieve capacity exceeded: need {needed}, capacity {capacity}")]
    Capacity { needed: u64, capacity: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used in CLI error objects and FFI status mapping.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ModulusMismatch { .. } => "modulus_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ContractViolation(_) => "contract_violation",
            Error::PostconditionViolation(_) => "postcondition_violation",
            Error::ScaleExhausted(_) => "scale_exhausted",
            Error::IncrementNotFound(_) => "increment_not_found",
            Error::DichotomyFailed { .. } => "dichotomy_failed",
            Error::Capacity { .. } => "capacity",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
