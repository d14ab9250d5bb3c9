//! Command implementations behind the `gtp` binary: coefficient-table caching,
//! correctness verification and benchmarking.

pub mod bench;
pub mod tables;
pub mod verify;

use std::path::PathBuf;

/// Environment variable that overrides the table cache directory.
pub const CACHE_ENV: &str = "GTP_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gtp_core::Error),
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(gtp_core::Error::Io { .. }) | CliError::Csv { .. } => 3,
            CliError::Core(_) | CliError::VerificationFailed => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Explicit directory, else `GTP_CACHE_DIR`, else `gtp-cache` under the
/// system temporary directory.
pub fn cache_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| std::env::temp_dir().join("gtp-cache"))
}
