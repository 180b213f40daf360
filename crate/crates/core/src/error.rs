use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("duplicate location ({x}, {y}) at rows {first} and {second}")]
    DuplicateLocation {
        x: f64,
        y: f64,
        first: usize,
        second: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular {context} system (condition indicator {condition:.3e})")]
    SingularSystem {
        context: &'static str,
        condition: f64,
    },

    #[error("green function of dimension {dimension} is unbounded at r = 0")]
    GreenSingularity { dimension: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("bad model file: {0}")]
    BadModel(String),
}

impl Error {
    /// Stable, machine-parseable category used as the CLI error prefix.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::DuplicateLocation { .. } => "duplicate-location",
            Error::InvalidGrid(_) => "invalid-grid",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::SingularSystem { .. } => "singular-system",
            Error::GreenSingularity { .. } => "green-singularity",
            Error::InsufficientData(_) => "insufficient-data",
            Error::BadModel(_) => "bad-model",
        }
    }
}
