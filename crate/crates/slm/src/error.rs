use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Problems with input files: schemas, CSV contents, model files.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("schema line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("schema must have exactly one label column, found {0}")]
    LabelColumns(usize),
    #[error("column `{0}` does not follow the u1..ud, z1..zp, label layout")]
    AutoSchema(String),
    #[error("CSV header does not match the schema: {0}")]
    Header(String),
    #[error("row {row}: expected {expected} fields, found {found}")]
    RowWidth { row: usize, expected: usize, found: usize },
    #[error("row {row}, column `{column}`: {message}")]
    Value {
        row: usize,
        column: String,
        message: String,
    },
    #[error("label column must take exactly two distinct values, found {0}")]
    LabelValues(usize),
    #[error("label `{0}` does not occur in the data")]
    UnknownLabel(String),
    #[error("continuous column `{0}` has no observed values")]
    AllMissing(String),
    #[error("model file: {0}")]
    ModelFile(String),
    #[error("unsupported model format version {found} (expected {expected})")]
    Version { found: u64, expected: u64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] slm_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl DataError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }
}
