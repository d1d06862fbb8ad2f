use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] gcs_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 2 for bad input, 3 for numeric or resource limits, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        use gcs_core::Error as E;
        match self {
            CliError::Invalid(_) => 2,
            CliError::Core(E::InvalidInput(_) | E::UndefinedPhase(_)) => 2,
            CliError::Core(E::NumericLimit(_) | E::ResourceLimit(_) | E::QuadratureOrthogonal { .. }) => 3,
            CliError::Io { .. } | CliError::Csv { .. } => 1,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}
