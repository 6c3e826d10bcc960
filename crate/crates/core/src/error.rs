use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TtoError {
    /// A precondition on the caller's input does not hold.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A numerical step did not meet its tolerance.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, TtoError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(TtoError::InvalidInput(msg.into()))
}

pub(crate) fn numerical<T>(msg: impl Into<String>) -> Result<T> {
    Err(TtoError::NumericalFailure(msg.into()))
}
