use thiserror::Error;

/// Errors raised by the matrix, mean, field and inequality routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix has no entries")]
    Empty,

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("asymmetry {asymmetry:e} exceeds allowed {allowed:e}")]
    NotNearlyHermitian { asymmetry: f64, allowed: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("field shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("function undefined at eigenvalue {eigenvalue:e}")]
    DomainError { eigenvalue: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPositiveSemidefinite { min_eig: f64 },

    #[error("negative power of a singular matrix (min eigenvalue {min_eig:e})")]
    SingularForNegativePower { min_eig: f64 },

    #[error("operand {operand} is not strictly positive (min eigenvalue {min_eig:e})")]
    NotStrictlyPositive { operand: &'static str, min_eig: f64 },

    #[error("argument must be positive, got {0:e}")]
    NonpositiveArgument(f64),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("Kronecker product of dimension {dim} exceeds the supported {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("sequence {name} is not {expected} at position {position}")]
    MonotonicityViolation {
        name: &'static str,
        expected: &'static str,
        position: usize,
    },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("unknown inequality `{0}`")]
    UnknownInequality(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("malformed inputs digest `{0}`")]
    MalformedDigest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
