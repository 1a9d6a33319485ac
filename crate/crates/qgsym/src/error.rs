use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("permutation degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("{what} exceeds cap: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("identity element is not allowed as a generator")]
    IdentityGenerator,

    #[error("invalid group table: {0}")]
    InvalidTable(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("node map is not a graph automorphism")]
    NotAnAutomorphism,

    #[error("graph must be connected for discretization")]
    Disconnected,

    #[error("mesh_n must be at least 2 (got {0})")]
    MeshTooCoarse(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("requested {requested} modes but the discrete form domain has dimension {available}")]
    TooManyModes { requested: usize, available: usize },

    #[error("state violates the vertex continuity constraints (residual {residual:e})")]
    StateOutsideDomain { residual: f64 },

    #[error("form matrix is not symmetric")]
    AsymmetricForm,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
