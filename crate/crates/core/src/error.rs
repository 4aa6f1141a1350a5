use thiserror::Error;

/// Errors raised by the graph, enumeration, spectral and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid vertex set: {0}")]
    InvalidSet(String),

    #[error("invalid nesting: inner set is not contained in the outer set")]
    InvalidNesting,

    #[error("complement of the whole vertex set is empty")]
    EmptyComplement,

    #[error("invalid edge: {0}")]
    InvalidEdge(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid k = {k} for graph on {n} vertices")]
    InvalidK { k: usize, n: usize },

    #[error("{cap} exceeded: n = {n}, limit = {limit}")]
    CapExceeded { cap: &'static str, limit: usize, n: usize },

    #[error("piece {0} has a single vertex and cannot be divided further")]
    Unsplittable(String),

    #[error("eigensolver failed to converge (residual {residual:e})")]
    SolverFailure { residual: f64 },

    #[error("Rayleigh quotient undefined for the zero function")]
    UndefinedQuotient,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
