//! Library half of the `meterleak` binary: grid parsing, the CSV sweep
//! commands, the simulate/leakage runners, and the named verification
//! suites. The binary in `main.rs` is a thin clap wrapper over these so
//! tests can drive everything in-process.

pub mod commands;
pub mod configfile;
pub mod grid;
pub mod verify;

/// Command failures, split by exit code: usage problems exit 2,
/// verification failures exit 1.
#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    Failure(String),
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Usage(msg) => write!(f, "{msg}"),
            CmdError::Failure(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<meterleak::Error> for CmdError {
    fn from(err: meterleak::Error) -> Self {
        match err {
            meterleak::Error::InvariantViolation(_) => CmdError::Failure(err.to_string()),
            _ => CmdError::Usage(err.to_string()),
        }
    }
}

pub type CmdResult<T> = Result<T, CmdError>;
