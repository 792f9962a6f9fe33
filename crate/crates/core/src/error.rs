//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller handed us something malformed (length mismatch, bad index,
    /// out-of-range parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested computation is only defined for a restricted
    /// configuration (e.g. the printed closed form exists only for the
    /// three-particle all-same-detector case).
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    /// The design-point solver could not find parameters inside the
    /// physical bounds.
    #[error("infeasible design: {0}")]
    InfeasibleDesign(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedCase(msg.into())
    }
}
