use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tree depth n = {n} outside supported range 1..={max}")]
    SizeLimit { n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("initial state not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("eigensolver failed to converge at eigenvalue index {index}")]
    NoConvergence { index: usize },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("unreliable envelope fit: {0}")]
    UnreliableEnvelope(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("refusing to overwrite existing output {0} (pass --overwrite)")]
    OutputExists(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SizeLimit { .. } => "size_limit",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Inconsistent(_) => "inconsistent",
            Error::UnreliableEnvelope(_) => "unreliable_envelope",
            Error::Config(_) => "config",
            Error::OutputExists(_) => "output_exists",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
