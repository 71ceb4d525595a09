use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("table size {requested} exceeds the configured capacity {cap}")]
    Capacity { requested: u64, cap: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("tables hold n <= {have}, but n <= {needed} is required")]
    TablesTooSmall { needed: u64, have: u64 },

    #[error("cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("arcs do not cover the unit interval (worst gap {gap:e})")]
    CoverFailure { gap: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
