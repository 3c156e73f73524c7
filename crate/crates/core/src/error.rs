use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: u64,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column}: {message}")]
    Parse {
        row: u64,
        column: usize,
        message: String,
    },

    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),

    #[error("column `{column}` has no values to impute from")]
    Imputation { column: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid cluster count k={k} for {n} points (need 1 <= k <= n)")]
    InvalidK { k: usize, n: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
