use std::fmt;
use std::process::ExitCode;

/// Failure classes with a fixed process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Output could not be read or written (exit 1).
    Io(String),
    /// Bad flags or an invalid run specification (exit 2).
    Usage(String),
    /// One or more verification checks failed (exit 3).
    Verification(Vec<String>),
}

impl CliError {
    pub fn status(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.status())
    }

    pub(crate) fn field(field: &str, msg: impl fmt::Display) -> Self {
        CliError::Usage(format!("invalid `{field}`: {msg}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(msg) => write!(f, "I/O error: {msg}"),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Verification(failed) => {
                write!(
                    f,
                    "{} verification check(s) failed: {}",
                    failed.len(),
                    failed.join(", ")
                )
            }
        }
    }
}

impl std::error::Error for CliError {}

/// Core errors raised while validating user input. Parameter errors already
/// carry the field name.
impl From<qdkd::Error> for CliError {
    fn from(e: qdkd::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
