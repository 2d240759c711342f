use thiserror::Error;

/// Everything that can go wrong in the library.  The variants line up with
/// the CLI exit codes (config 2, budget 3, coverage 4, precision 5).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("coverage violation: {0}")]
    Coverage(String),

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
