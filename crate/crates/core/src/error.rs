use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("weight evaluated outside its domain at t = {t}")]
    Domain { t: f64 },
    #[error("invalid weight parameter: {0}")]
    InvalidParameter(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("weight JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid size mismatch: expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("truncation N = {0} must be a power of two >= {1}")]
    BadTruncation(usize, usize),
    #[error("dimension {0} not supported (expected 1 or 2)")]
    BadDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field encoding: {0}")]
    Encoding(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("covariance check needs at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("unsupported source term: {0}")]
    UnsupportedSource(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}
