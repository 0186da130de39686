use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Config {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("QTRACE_THREADS must be a positive integer, got {0:?}")]
    Threads(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qtrace_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
