use std::fmt;

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration, bad arguments, I/O trouble.
    Config(String),
    /// The command ran but found nothing; its (empty) result was printed.
    Empty,
    /// A solver or integrator failed.
    Numerical(String),
    /// At least one solution failed verification; the report was printed.
    VerificationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Empty => 2,
            CliError::Numerical(_) => 3,
            CliError::VerificationFailed { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Empty => write!(f, "empty result"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::VerificationFailed { failed, total } => {
                write!(f, "{failed} of {total} solutions failed verification")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<qcc_core::Error> for CliError {
    fn from(e: qcc_core::Error) -> Self {
        match e {
            qcc_core::Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}
