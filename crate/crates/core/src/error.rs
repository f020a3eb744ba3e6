use std::path::PathBuf;

use thiserror::Error;

/// Which dimension of two tables disagreed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeDim {
    Rows,
    Cols,
    Schema,
}

impl std::fmt::Display for ShapeDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ShapeDim::Rows => "rows",
            ShapeDim::Cols => "cols",
            ShapeDim::Schema => "schema",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("table has no data rows")]
    EmptyTable,
    #[error("shape mismatch ({0})")]
    ShapeMismatch(ShapeDim),
    #[error("cell ({row}, {col}) is out of bounds")]
    OutOfBounds { row: usize, col: usize },
    #[error("could not decode: {0}")]
    Decode(String),
    #[error("format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("vector length for column {col} changed from {expected} to {found}")]
    LengthDrift {
        col: usize,
        expected: usize,
        found: usize,
    },
    #[error("probability {value} at row {row} is outside [0, 1]")]
    BadProbability { row: usize, value: f64 },
    #[error("token {0:?} is not in the embedding vocabulary")]
    UnknownToken(String),
    #[error("expected {expected} features, got {found}")]
    FeatureLengthMismatch { expected: usize, found: usize },
    #[error("column {0} has no trained model yet")]
    NotTrained(usize),
    #[error("label budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("no selectable column remains")]
    NoSelectableColumn,
    #[error("column {0} has no unlabeled cells")]
    ColumnExhausted(usize),
    #[error("submitted labels do not match the pending batch: {0}")]
    LabelMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid injection plan: {0}")]
    BadPlan(String),
    #[error("no run log entries")]
    EmptyLog,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
