use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {vertex} out of range (vertex count is {n})")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("unknown gallery name `{0}`")]
    UnknownGallery(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded after {spent} expansions ({found} results so far)")]
    Budget { spent: u64, found: usize },

    #[error("{generators:?} does not generate the algebra; it generates the proper subuniverse {closure:?}")]
    NotGenerating {
        generators: Vec<usize>,
        closure: Vec<usize>,
    },

    /// A property that the construction guarantees failed to hold on a
    /// concrete instance. This never occurs for correct inputs; it exists
    /// so that a falsifying instance is reported instead of ignored.
    #[error("consistency check failed: {0}")]
    Falsified(String),
}
