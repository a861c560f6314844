use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("L = {degree}, {functional}: {source}")]
    Compute {
        degree: usize,
        functional: String,
        #[source]
        source: sphere_ls::Error,
    },
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type LabResult<T> = std::result::Result<T, LabError>;

impl LabError {
    /// Process exit code: 2 for resource-guard refusals, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Compute { source, .. } if source.is_resource() => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
