use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix entries contain NaN or infinity")]
    NonFinite,

    #[error("invalid matrix shape: {0}")]
    InvalidShape(String),

    #[error("SVD did not converge after {sweeps} sweeps")]
    SvdNoConvergence { sweeps: usize },

    #[error("matrix is singular (smallest singular value {smallest:e})")]
    Singular { smallest: f64 },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("invalid Weyl index ({n}, {m}) for dimension {d}")]
    InvalidWeylIndex { n: usize, m: usize, d: usize },

    #[error("invalid Schmidt vector: {0}")]
    InvalidSchmidt(String),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("seed is maximally entangled")]
    MaximallyEntangled,

    #[error("seed is a product state")]
    ProductState,

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid search parameters: {0}")]
    InvalidParams(String),

    #[error("invalid basis candidate: {0}")]
    InvalidCandidate(String),

    #[error("malformed basis file: {0}")]
    Format(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}
