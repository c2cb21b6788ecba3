use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Precision(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for anything the caller got wrong, 3 when the numerics gave up or a
    /// verification did not hold.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 2,
            CliError::Precision(_) | CliError::Verification(_) => 3,
        }
    }

    pub fn missing(flag: &str) -> Self {
        CliError::Validation(format!("missing required flag --{flag}"))
    }
}

impl From<fmd_core::Error> for CliError {
    fn from(err: fmd_core::Error) -> Self {
        match err {
            fmd_core::Error::Precision(_) | fmd_core::Error::Degenerate { .. } => {
                CliError::Precision(err.to_string())
            }
            _ => CliError::Validation(err.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
