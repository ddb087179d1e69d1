use thiserror::Error;

/// Errors produced while validating inputs or running a solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MfefError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("entry count mismatch: expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian: max |A - A^H| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("trace deviates from one: trace = {trace}")]
    TraceDeviation { trace: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("matrix is not unitary: max |U U^H - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("coefficient vector violates unitarity constraints: residual {residual:e}")]
    ConstraintViolation { residual: f64 },

    #[error("empty operand list")]
    Empty,

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("memory budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, MfefError>;

impl From<std::io::Error> for MfefError {
    fn from(e: std::io::Error) -> Self {
        MfefError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for MfefError {
    fn from(e: serde_json::Error) -> Self {
        MfefError::Parse(e.to_string())
    }
}
