use thiserror::Error;
use wtfb::sim::SimError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, files or parameters.
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Infeasible(String),
    /// Message already printed with the per-check report.
    #[error("{failed} check(s) failed")]
    ChecksFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::Invalid(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }

    pub fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(wtfb::BoundsError, wtfb::ChannelError, wtfb::InfoError, std::io::Error, serde_json::Error);
