use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("evaluation produced a non-finite value at sample {sample}, channel {channel}")]
    NonFinite { sample: usize, channel: usize },

    #[error("empty cloud: {0}")]
    EmptyCloud(String),

    #[error("evidence kind mismatch: {0}")]
    KindMismatch(String),

    #[error("indeterminate distance: {0}")]
    Indeterminate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver failure at step {step}: fixed-point iteration did not converge (residual {residual:e})")]
    WellPosedness { step: usize, residual: f64 },

    #[error("loop diverged at step {step}")]
    Divergence { step: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
