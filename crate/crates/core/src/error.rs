//! Error type shared across the library.

/// Errors produced by ingestion, linearization, retrieval, and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A malformed input line. Recoverable: callers may skip and count.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// Bad or missing configuration (unreadable list file, missing vocab, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside its documented range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A binary file that does not follow its format, with the byte offset
    /// at which decoding failed.
    #[error("format error at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    /// Inconsistent data, e.g. a retrieval hit naming an unknown passage.
    #[error("data error: {0}")]
    Data(String),

    /// A CVT star that cannot be rendered as a sentence. The caller routes
    /// the node's triples back through the ordinary grouping path.
    #[error("degenerate CVT node `{node}`: {reason}")]
    DegenerateCvt { node: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
