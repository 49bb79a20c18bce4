use crate::graph::ValidationReport;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(ValidationReport),

    #[error("vertex {0} not found")]
    VertexNotFound(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate polyline: {0}")]
    DegeneratePolyline(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("non-finite cost at row {row}, col {col}")]
    NonFiniteCost { row: usize, col: usize },

    #[error("singular least-squares system: {0}")]
    SingularSystem(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at `{field_path}`: {message}")]
    Parse { field_path: String, message: String },

    #[error("unsupported schema_version `{found}` (supported: `{supported}`)")]
    SchemaVersion { found: String, supported: String },
}

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
