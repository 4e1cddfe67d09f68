use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid entry: {0}")]
    InvalidEntry(String),

    #[error("negative input: {0}")]
    NegativeInput(String),

    #[error("order {0} is not odd")]
    EvenOrder(usize),

    #[error("unsupported order {n}: {reason}")]
    UnsupportedOrder { n: usize, reason: String },

    #[error("matrix is not in block form")]
    NotBlockForm,

    #[error("matrix is not lexicographically maximal")]
    NotLexMax,

    #[error("not a member of the Gram class: {0}")]
    NotInClass(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("node budget of {budget} exhausted")]
    BudgetExhausted { budget: u64, checkpoint: Option<PathBuf> },

    #[error("checkpoint does not match configuration: {0}")]
    CheckpointMismatch(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
