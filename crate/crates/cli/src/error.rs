use std::path::PathBuf;

use thiserror::Error;

/// Failure classes, each with a stable process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {detail}", path.display())]
    Config { path: PathBuf, detail: String },

    #[error(transparent)]
    Core(#[from] ivie_core::Error),

    #[error("{failed} mandatory check(s) failed: {names}")]
    ChecksFailed { failed: usize, names: String },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 usage, 2 data, 3 numerical or failed validation.
    pub fn exit_code(&self) -> i32 {
        use ivie_core::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Config { .. } => 2,
            CliError::Core(e) => match e {
                E::NoInformation | E::Numerical(_) => 3,
                _ => 2,
            },
            CliError::ChecksFailed { .. } => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
