use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (non-finite values, empty data).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("index error: {0}")]
    Index(String),

    /// One or more model-level violations; every violation is listed.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("rank deficient: numerical rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("explosive trajectory: non-finite value at index {index}")]
    Explosive { index: usize },

    #[error("precondition error: {0}")]
    Precondition(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable category used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Shape(_) => "shape",
            Error::Index(_) => "index",
            Error::Validation(_) => "validation",
            Error::Config(_) => "config",
            Error::Numeric(_) => "numeric",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::Explosive { .. } => "explosive_trajectory",
            Error::Precondition(_) => "precondition",
            Error::Estimation(_) => "estimation",
            Error::Usage(_) => "usage",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}
