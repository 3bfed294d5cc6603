use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The variants are grouped so that front ends can map them onto stable
/// exit codes: parse errors, validation errors, and numerical errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("rank deficient input: column {column} has residual norm {residual:e}")]
    Rank { column: usize, residual: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("classification failed: {0}")]
    Classification(String),

    #[error("numerically degenerate: {0}")]
    Degenerate(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Broad category of the error, used for exit-code mapping.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) => ErrorKind::Parse,
            Error::Shape(_) | Error::Validation(_) | Error::Rank { .. } | Error::Domain(_) => {
                ErrorKind::Validation
            }
            Error::Convergence { .. } | Error::Classification(_) | Error::Degenerate(_) => {
                ErrorKind::Numerical
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
    Numerical,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
