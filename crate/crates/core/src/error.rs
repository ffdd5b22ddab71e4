use thiserror::Error;

/// Errors produced by the model, the closed forms and the numerical oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The stationary regime needs |alpha| < 1, i.e. beta in (-2, 0).
    #[error("stability violation: beta = {beta} is outside (-2, 0)")]
    StabilityViolation { beta: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    #[error("state {value} is outside the grid [{lower}, {upper}]")]
    OutOfRange { value: f64, lower: f64, upper: f64 },

    #[error("degenerate linear system: {0}")]
    DegenerateSystem(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
