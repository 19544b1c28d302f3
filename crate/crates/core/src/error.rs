use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed configuration or problem description.
    #[error("config: {0}")]
    Config(String),

    /// Structural mismatch (wrong dimensions, shapes, index bounds).
    #[error("dimension: {0}")]
    Dimension(String),

    /// A precondition that callers must establish was violated.
    #[error("precondition: {0}")]
    Precondition(String),

    /// Linear algebra failure (singular factorization, failed Cholesky, ...).
    #[error("solver: {0}")]
    Solver(String),

    /// A numerical quality check failed beyond its tolerance.
    #[error("numeric: {0}")]
    Numeric(String),

    /// A configured work budget was exhausted.
    #[error("budget: {0}")]
    Budget(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
