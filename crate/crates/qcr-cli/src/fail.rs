use std::path::PathBuf;

/// Anything that aborts a command before a verdict. Every variant maps to
/// exit code 2; messages name the violated invariant or the failing file.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: invalid JSON: {source}", path.display())]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("{}: {detail}", path.display())]
    Shape { path: PathBuf, detail: String },

    #[error("{}: {source}", path.display())]
    Invalid {
        path: PathBuf,
        source: qcr_core::Error,
    },

    #[error("{}: cannot write: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] qcr_core::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;
