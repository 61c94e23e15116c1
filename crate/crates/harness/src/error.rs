use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("run failed: {0}")]
    Run(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for configuration problems, 2 for everything
    /// that goes wrong once runs have started.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            _ => 2,
        }
    }
}

impl From<svi_core::Error> for HarnessError {
    fn from(e: svi_core::Error) -> Self {
        match e {
            svi_core::Error::Config(m) => HarnessError::Config(m),
            other => HarnessError::Run(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
