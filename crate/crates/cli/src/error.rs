use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] qnd_core::Error),
    #[error("Fock truncation too small: top-level population {population:.3e} exceeds {threshold:.1e}")]
    Truncation { population: f64, threshold: f64 },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Truncation { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}
