use asyncleap::{Error, RunStatus};
use thiserror::Error as ThisError;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const IO: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const BLOW_UP: u8 = 3;
    pub const STEP_UNDERFLOW: u8 = 4;
    pub const ORACLE: u8 = 5;
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// The reader of our output went away, as with `| head`.
    pub fn is_broken_pipe(&self) -> bool {
        let io = match self {
            CliError::Io(e) => Some(e),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e),
                _ => None,
            },
            _ => None,
        };
        io.is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io(_) | CliError::Csv(_) => exit::IO,
            CliError::Core(e) => match e {
                Error::BlowUp { .. } => exit::BLOW_UP,
                Error::StepUnderflow { .. } => exit::STEP_UNDERFLOW,
                Error::KeplerNonConvergence { .. } | Error::InitNonConvergence { .. } => {
                    exit::ORACLE
                }
                // Everything else traces back to a parameter the user chose.
                Error::Domain { .. }
                | Error::Dimension { .. }
                | Error::InvalidParameter { .. }
                | Error::UnboundOrbit { .. }
                | Error::Config(_) => exit::USAGE,
            },
        }
    }
}

/// Exit status for a run that finished writing its output.
pub fn status_code(status: RunStatus) -> u8 {
    match status {
        RunStatus::Completed => exit::SUCCESS,
        RunStatus::BlewUp => exit::BLOW_UP,
        RunStatus::StepUnderflow => exit::STEP_UNDERFLOW,
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
