use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid config: {0}")]
    Config(#[from] serde_json::Error),
    #[error("invalid config {}: {source}", path.display())]
    ConfigFile { path: std::path::PathBuf, source: serde_json::Error },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] hadamard_core::Error),
}

impl CliError {
    /// Process exit status; assertion failures are reported separately
    /// (status 2) because they still produce a report.
    pub fn exit_code(&self) -> u8 {
        1
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;
