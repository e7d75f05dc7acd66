use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: semired::Error,
    },

    #[error(transparent)]
    Core(#[from] semired::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Exit codes: 2 usage, I/O, parse and precondition errors; 3 a
    /// non-integral input; 5 an enumeration over its cap; 6 a failed
    /// internal self-check.
    pub fn exit_code(&self) -> u8 {
        let core = match self {
            CliError::Io { .. } | CliError::Usage(_) => return 2,
            CliError::Input { source, .. } => source,
            CliError::Core(e) => e,
        };
        match core {
            semired::Error::NotIntegral(_) => 3,
            semired::Error::CapExceeded { .. } => 5,
            semired::Error::InternalVerification(_) => 6,
            _ => 2,
        }
    }
}
