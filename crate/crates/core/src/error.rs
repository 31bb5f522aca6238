use thiserror::Error;

/// Errors raised by the engine.
///
/// Every variant carries a human-readable description; the CLI maps the
/// variants onto process exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("polytope is not Delzant: {0}")]
    NotDelzant(String),
    #[error("sampling budget exhausted: {0}")]
    Sampling(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}
