use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unipotent action trivial: the grading weight ladder has a single value")]
    TrivialUnipotent,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("scale exceeded: {0}")]
    ScaleExceeded(String),
    #[error("direction required: point lies on the blow-up center")]
    DirectionRequired,
    #[error("direction is tangent to the blow-up center")]
    TangentDirection,
    #[error("audit failure: {0}")]
    Audit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("unknown point: {0}")]
    UnknownPoint(String),
    #[error("unknown locus: {0}")]
    UnknownLocus(String),
}

pub type Result<T> = std::result::Result<T, Error>;
