use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols} for {op}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("zero pivot at index {index}: matrix has a singular leading structure (no pivoting is performed)")]
    SingularStructure { index: usize },

    #[error("square root of a negative value")]
    NegativeSqrt,

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid decimal literal {literal:?}: {reason}")]
    InvalidDecimal { literal: String, reason: &'static str },

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("reference matrix is entirely zero but the computed matrix is not")]
    ZeroReference,

    #[error("matrix file is malformed at line {line}: {reason}")]
    MalformedMatrixFile { line: usize, reason: String },

    #[error("worker pool error: {0}")]
    WorkerPool(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
