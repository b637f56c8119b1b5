use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SopError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical instability in {term}: {detail}")]
    Instability { term: String, detail: String },

    #[error("quadrature did not converge: estimate {estimate:e}, achieved error {achieved:e}")]
    Quadrature { estimate: f64, achieved: f64 },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SopError>;

pub(crate) fn domain(msg: impl Into<String>) -> SopError {
    SopError::Domain(msg.into())
}

impl From<std::io::Error> for SopError {
    fn from(e: std::io::Error) -> Self {
        SopError::Io(e.to_string())
    }
}
