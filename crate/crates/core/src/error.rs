use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported grid scheme {scheme:?} for {operation}")]
    UnsupportedScheme {
        scheme: crate::discretize::Scheme,
        operation: &'static str,
    },

    #[error("operator is not symmetric")]
    NotSymmetric,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("eigenfunction overlap insufficient: {0}")]
    InsufficientOverlap(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(value: f64, what: &'static str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
