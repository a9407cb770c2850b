use std::fmt;

use frontier_tails::Error;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Usage = 2,
    Data = 3,
    Numeric = 4,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { exit: Exit::Usage, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure { exit: Exit::Data, message: message.into() }
    }


    pub fn io(what: &str, e: std::io::Error) -> Self {
        Failure::data(format!("{what}: {e}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match &e {
            Error::InvalidTailIndex(_) => Exit::Usage,
            Error::DegenerateTail(_)
            | Error::InvalidTail(_)
            | Error::RankDeficient(_)
            | Error::ZeroVariance
            | Error::InvalidInput(_)
            | Error::Artifact(_) => Exit::Data,
            Error::QuadratureFailure { .. } | Error::CalibrationMismatch(_) | Error::CalibrationDivergence { .. } => {
                Exit::Numeric
            }
        };
        Failure { exit, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, Failure>;
