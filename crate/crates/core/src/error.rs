use thiserror::Error;

/// Errors shared across modules that do not belong to a single stage.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("unknown relation label {0:?}")]
    UnknownLabel(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: invalid JSON record: {source}")]
    Json {
        path: String,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}
