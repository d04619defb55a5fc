use std::fmt;
use std::path::Path;

use arbgame::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad input or configuration. Exit code 2.
    Validation(String),
    /// No equilibrium could be produced. Exit code 3.
    Solver(String),
    /// Verification ran but some checks are outside their thresholds. Exit code 4.
    ChecksFailed(Vec<String>),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Validation(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
            CliError::ChecksFailed(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::ChecksFailed(names) => write!(f, "failed checks: {}", names.join(", ")),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoTrade { .. } | Error::NonConvergence { .. } | Error::BracketMissing { .. } => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}
