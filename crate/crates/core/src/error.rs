use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("unsupported input format '{0}' (only .csv is supported)")]
    UnsupportedFormat(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("cleaning failed: {0}")]
    Cleaning(String),

    #[error("routing failed: {0}")]
    Routing(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("planner failure: {0}")]
    Planner(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// An internal invariant was broken. Never expected in a correct build.
    #[error("contract violation: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
