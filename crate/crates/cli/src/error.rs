use std::path::PathBuf;

/// Failures of a CLI command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or inconsistent input; exit code 2.
    #[error("{0}")]
    Invalid(String),
    /// The optimizer or a series failed to converge; exit code 3.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::NoConvergence(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<ergocap::Error> for CliError {
    fn from(e: ergocap::Error) -> Self {
        match e {
            ergocap::Error::NoConvergence(msg) => CliError::NoConvergence(msg),
            other => CliError::Invalid(other.to_string()),
        }
    }
}
