use std::path::PathBuf;

use stokes_perturb_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Assertion(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// `1` for numerical failures, `2` for usage, configuration and IO problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } | CliError::Config(_) => 2,
            CliError::Assertion(_) => 1,
            CliError::Core(e) => match e {
                CoreError::NotConverged { .. }
                | CoreError::AssemblyAsymmetry { .. }
                | CoreError::BadNullspace { .. }
                | CoreError::DimensionMismatch { .. } => 1,
                _ => 2,
            },
        }
    }
}
