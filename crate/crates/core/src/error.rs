use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation at the pole t = {0}")]
    PoleEvaluation(i64),
    #[error("not invertible in K_T: {0}")]
    NotInvertible(String),
    #[error("untraceable pairing: {0}")]
    Untraceable(String),
    #[error("extraction failed: residual {residual} on window {window}")]
    ExtractionFailed { residual: String, window: String },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("axiom violated: {0}")]
    AxiomViolation(String),
    #[error("state depth {depth} exceeds the limit {limit}")]
    DepthExceeded { depth: usize, limit: usize },
    #[error("syntax error at line {line}, column {column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("type error: {0}")]
    Type(String),
    #[error("invalid algebra: {0}")]
    Algebra(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
