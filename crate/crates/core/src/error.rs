use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has {rows} rows and {cols} columns; both must be positive")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("column {column} is numerically dependent on its predecessors")]
    DegenerateColumn { column: usize },

    #[error("eigenvalue {value} is negative")]
    NegativeEigenvalue { value: f64 },

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("singular matrix (pivot {pivot})")]
    SingularMatrix { pivot: usize },

    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid block partition: {0}")]
    InvalidPartition(String),

    #[error("dimension p = {p} must be smaller than the sample size n = {n}")]
    DimensionExceedsSample { n: usize, p: usize },

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("significance level {0} must lie strictly between 0 and 1")]
    InvalidAlpha(f64),

    #[error("variable {column} has zero sample variance")]
    ZeroVariance { column: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid simulation plan: {0}")]
    InvalidPlan(String),
}
