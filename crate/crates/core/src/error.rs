use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("quadrature needs at least 4K nodes: K = {degree}, nodes = {nodes}")]
    TooFewNodes { degree: usize, nodes: usize },

    #[error("oracle enumeration limited to n <= {max}, got n = {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("enumeration bound exceeded: {estimate} paths > {limit}")]
    EnumerationBound { estimate: f64, limit: f64 },

    #[error("graph is not {0}")]
    NotRegular(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("theorem requires c >= d, got c = {c}, d = {d}")]
    BiregularOrder { c: u64, d: u64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("series tail too large: sum of k*c_k^2 beyond K is {tail:.3e}")]
    SeriesTail { tail: f64 },

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
