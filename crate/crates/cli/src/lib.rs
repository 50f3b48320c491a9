//! Command-line front end, file formats and simulation harness for
//! `streamcount`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod format;
pub mod simulate;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed sketch file: {0}")]
    Format(#[from] format::FormatError),
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] streamcount::Error),
}

impl CliError {
    /// 1 for usage errors, 2 for I/O and file errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 1,
            CliError::Io(_) | CliError::Format(_) | CliError::Csv(_) => 2,
        }
    }
}
