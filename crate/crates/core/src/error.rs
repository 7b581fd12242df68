//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by construction, validation and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("invalid term: {0}")]
    Term(String),
    #[error("support {support:?} is out of range for a layout with {sites} sites")]
    SupportOutOfRange { support: Vec<usize>, sites: usize },
    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("dimension {0} exceeds the configured limit")]
    DimensionOverflow(String),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("basis is not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("invalid circuit: {0}")]
    Circuit(String),
    #[error("invalid query machine: {0}")]
    Machine(String),
    #[error("invalid verifier model: {0}")]
    Verifier(String),
    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
