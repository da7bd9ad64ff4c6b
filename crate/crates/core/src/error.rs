use thiserror::Error;

/// Failure modes shared by every solver stage.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-range input; `field` names the offending input.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    /// A parameter outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A search or table exceeded its configured budget.
    #[error("capacity exceeded in {stage}: {message}")]
    Capacity { stage: String, message: String },
    /// The input violates the ratio bound required before rounding.
    #[error("processing-time ratio {ratio} exceeds n^{exponent}; route the instance through the outer DP")]
    NeedsOuterDp { ratio: String, exponent: u32 },
    /// A broken solver invariant.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn capacity(stage: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Capacity {
            stage: stage.into(),
            message: message.into(),
        }
    }

    /// Prefixes the stage of a capacity error with extra context.
    pub fn in_stage(self, context: &str) -> Self {
        match self {
            Error::Capacity { stage, message } => Error::Capacity {
                stage: format!("{context}/{stage}"),
                message,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
