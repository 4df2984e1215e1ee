//! Error taxonomy shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A requested object would exceed a configured size cap.
    #[error("capacity exceeded: required {required}, cap {cap}")]
    Capacity { required: usize, cap: usize },

    /// The call itself is malformed (bad arguments, missing structure).
    #[error("usage: {0}")]
    Usage(String),

    /// The inputs are structurally fine but violate a mathematical
    /// precondition (non-Hermitian, negative eigenvalue, ...).
    #[error("domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
