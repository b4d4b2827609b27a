use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("phase points must have 2 or 4 coordinates, got {0}")]
    BadDimension(usize),

    #[error("tensor slot must be 1 or 2, got {0}")]
    BadSlot(u8),

    #[error("term cap exceeded: {terms} terms > limit {limit}")]
    TermCap { terms: usize, limit: usize },

    #[error("duplicate phase point at index {0}")]
    DuplicatePoint(usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("kernel support relation is not an equivalence: {0}")]
    NotEquivalence(String),

    #[error("Gram matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("invalid Bell candidate: {0}")]
    InvalidCandidate(String),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("expectation has non-negligible imaginary part {0:e}")]
    NonReal(f64),

    #[error("matrix model dimension must be even and in 2..=64, got {0}")]
    BadModelDimension(usize),

    #[error("matrix model invariant violated by {0:e}")]
    ModelInvariant(f64),

    #[error("operation requires the EPR state")]
    NotEpr,

    #[error("the zero phase point is not allowed here")]
    ZeroPoint,

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}
