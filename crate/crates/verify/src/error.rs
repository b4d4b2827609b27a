use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const FAIL: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const RESOURCE: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Engine(#[from] epr_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use epr_core::Error as E;
        match self {
            CliError::Engine(E::TermCap { .. }) => exit::RESOURCE,
            CliError::Engine(
                E::NotPositive(_)
                | E::NotEquivalence(_)
                | E::InvalidCandidate(_)
                | E::NonReal(_)
                | E::ModelInvariant(_)
                | E::NotHermitian(_),
            ) => exit::FAIL,
            _ => exit::USAGE,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
