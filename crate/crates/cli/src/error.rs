use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Numerical(#[from] cqed::Error),

    /// A run finished but its output violates a physical invariant.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(cqed::Error::Config(_)) => 2,
            Self::Numerical(_) | Self::Contract(_) => 3,
            Self::Io { .. } => 1,
        }
    }
}
