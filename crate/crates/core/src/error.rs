use thiserror::Error;

use crate::circuit::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: {op} expects {expected} argument(s), got {got}")]
    Arity {
        line: usize,
        op: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(ValidationReport),

    #[error("input length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("output width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("budget exceeded: {what} needs {needed} input bits, budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: usize,
        budget: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("natural image ill-defined for argument {argument}")]
    NaturalImageUndefined { argument: String },

    #[error("{value} is not representable with {bits} coin bits")]
    NotRepresentable { value: String, bits: u32 },

    #[error("pluggable dependency absent: {0}")]
    MissingDependency(String),

    #[error("density matrix invariant violated: {0}")]
    InvalidState(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status used by the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 2,
            _ => 1,
        }
    }
}
