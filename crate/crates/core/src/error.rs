use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("weight {index} non-positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("bulk buffer {buffer} must be smaller than dimension {dim}")]
    BulkBuffer { buffer: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis tag mismatch: {left} vs {right}")]
    BasisMismatch { left: String, right: String },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("entry ({row}, {col}) lies outside declared bandwidth {bandwidth}")]
    Bandwidth { row: usize, col: usize, bandwidth: usize },
    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    NoConvergence { dim: usize },
    #[error("matrix is numerically singular")]
    Singular,
    #[error("degenerate path: dz/ds vanishes at node {node}")]
    DegeneratePath { node: usize },
    #[error("sample {node} at {point} lies outside the function domain")]
    OutsideDomain { node: usize, point: String },
    #[error("exceptional-point proximity at mode {mode}: |<L|R>| = {overlap:e}")]
    ExceptionalPoint { mode: usize, overlap: f64 },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("operator is not PT-symmetric (defect {0:e})")]
    NotPtSymmetric(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
