use std::path::PathBuf;

/// Everything that makes a command exit with status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed {what}: {source}")]
    Json {
        what: String,
        source: serde_json::Error,
    },
    #[error("edges[{index}] ({i}, {j}): {source}")]
    Edge {
        index: usize,
        i: usize,
        j: usize,
        source: mwcontrol_core::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] mwcontrol_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
