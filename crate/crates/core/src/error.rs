use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid parameters: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("(k, n) mismatch: expected ({0}, {1}), got ({2}, {3})")]
    Mismatch(usize, usize, usize, usize),

    #[error("invalid edge: {0}")]
    InvalidEdge(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("no legal relabeling for component at {0:?}")]
    Structural(Vec<u32>),

    #[error("degenerate ball-cut evaluation at {0}")]
    Degenerate(String),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("LP solver failure: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
