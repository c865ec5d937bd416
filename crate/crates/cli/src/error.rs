use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Config(_) => 3,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl From<mdpd::Error> for CliError {
    fn from(e: mdpd::Error) -> Self {
        use mdpd::Error::*;
        match e {
            InvalidQuantization(_)
            | FieldCountMismatch { .. }
            | InvalidOrder(_)
            | EpsilonTooLarge { .. }
            | InvalidEpsilon(_)
            | TooFewFields(_)
            | InvalidQ(_) => CliError::Config(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
