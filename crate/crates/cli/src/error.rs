use thiserror::Error;

/// Exit status of an invocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    /// Every hard assertion of the experiment held.
    Passed = 0,
    /// Artifacts written, at least one hard assertion failed.
    AssertionFailed = 1,
    /// Config or command line rejected.
    Usage = 2,
    /// An eigensolve or grid refinement did not converge; partial artifacts are flagged.
    NotConverged = 3,
    /// Artifacts could not be written.
    Io = 4,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] anisospec_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        use anisospec_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Json(_) => ExitStatus::Usage,
            CliError::Core(E::LinearAlgebra(_)) => ExitStatus::NotConverged,
            CliError::Core(E::Io(_)) | CliError::Io(_) | CliError::Csv(_) => ExitStatus::Io,
            CliError::Core(_) => ExitStatus::Usage,
        }
    }
}
