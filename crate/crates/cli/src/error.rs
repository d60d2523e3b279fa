use std::fmt;

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag combination.
    Usage(String),
    /// Unreadable or malformed input file.
    Parse(String),
    Io(String),
    Math(matdec::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Math(matdec::Error::NoConvergence { .. } | matdec::Error::NonFiniteLoss { .. }) => 4,
            CliError::Math(e) if e.is_mathematical() => 3,
            CliError::Math(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage: {s}"),
            CliError::Parse(s) => write!(f, "parse: {s}"),
            CliError::Io(s) => write!(f, "io: {s}"),
            CliError::Math(e) => write!(f, "{e}"),
        }
    }
}

impl From<matdec::Error> for CliError {
    fn from(e: matdec::Error) -> Self {
        CliError::Math(e)
    }
}
