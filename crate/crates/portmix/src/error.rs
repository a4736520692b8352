use std::path::PathBuf;

/// Failures of the command-line front end, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] portmix_core::Error),
    #[error("model fit failed: {0}")]
    Fit(String),
    #[error("{0}")]
    Discards(String),
}

impl CliError {
    /// 1 for usage, configuration and file errors, 2 for fit failures
    /// (including experiments whose discard rate was breached).
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Fit(_) | CliError::Discards(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Parse { path: path.into(), message: message.into() }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
