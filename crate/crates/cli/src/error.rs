use dce_core::DceError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(DceError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Domain errors come from user-supplied values; everything else is numerical.
    pub fn from_core(e: DceError) -> Self {
        match e {
            DceError::Domain(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<DceError> for CliError {
    fn from(e: DceError) -> Self {
        CliError::from_core(e)
    }
}
