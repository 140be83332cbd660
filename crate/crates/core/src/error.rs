use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("node budget of {budget} DFS nodes exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("seed table has a gap: no value for n = {index}")]
    SeedGap { index: usize },

    #[error("hypothesis not verified: {0}")]
    HypothesisNotVerified(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Cache(#[from] CacheError),
}

/// Failures while reading or writing a rich-count cache file.
#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache file {path} is malformed at line {line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("cache schema version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("cache holds q = {found}, requested q = {expected}")]
    QMismatch { found: u32, expected: u32 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CacheError {
    /// Stable numeric code per failure kind.
    pub fn code(&self) -> u8 {
        match self {
            CacheError::Malformed { .. } => 10,
            CacheError::VersionMismatch { .. } => 11,
            CacheError::QMismatch { .. } => 12,
            CacheError::Io { .. } => 13,
        }
    }
}
