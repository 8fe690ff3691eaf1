use thiserror::Error;

/// Failures that end a run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: unreadable or malformed file, invalid arguments.
    #[error("input error: {0}")]
    Input(String),
    /// A bound or oracle relation that must hold did not.
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] tvgap::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Core(e) => match e {
                tvgap::Error::NonFinite(_)
                | tvgap::Error::InvalidSigma(_)
                | tvgap::Error::SigmaMismatch
                | tvgap::Error::DimensionMismatch { .. }
                | tvgap::Error::NotSymmetric { .. }
                | tvgap::Error::NotPositiveDefinite { .. } => 1,
                _ => 2,
            },
            CliError::Invariant(_) => 2,
        }
    }
}
