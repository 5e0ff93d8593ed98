use std::io;
use std::path::PathBuf;

use opshape_core::{GeometryError, StatsError, SynthError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: u64, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("geometric degeneracy: {0}")]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Stats(#[from] StatsError),
    #[error("statistical degeneracy (--strict): {0}")]
    StrictDegeneracy(String),
    #[error("{0}")]
    Synth(#[from] SynthError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Process exit status: 2 for unreadable or malformed input, 3 for
    /// geometric degeneracy, 4 for statistical degeneracy under `--strict`.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Schema { .. } => 2,
            CliError::Geometry(_) => 3,
            CliError::StrictDegeneracy(_) => 4,
            _ => 1,
        }
    }
}
