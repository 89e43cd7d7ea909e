use std::path::PathBuf;

use thiserror::Error;

/// Failures that prevent a scenario from running at all (exit code 2).
/// A scenario that runs and fails its checks is reported, not raised.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    ConfigParse(String),
    #[error("unknown fixture {name:?} (available: {available})")]
    UnknownFixture { name: String, available: String },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid LCS_THREADS value {0:?}")]
    Threads(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
