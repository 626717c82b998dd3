use std::fmt;
use std::process::ExitCode;

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable input, bad flags or configuration (exit 2).
    Input(String),
    /// Shape or solver failure inside the estimators (exit 3).
    Numerical(String),
    /// A verification check exceeded its tolerance (exit 4).
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::CheckFailed(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) | CliError::CheckFailed(m) => f.write_str(m),
        }
    }
}

impl From<factorboot::Error> for CliError {
    fn from(e: factorboot::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
