//! CLI errors and the exit-code contract.

use mfou_core::Error as CoreError;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    ChecksFailed(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::ChecksFailed(_) => EXIT_CHECKS_FAILED,
            CliError::Core(e) => match e {
                CoreError::Domain { .. }
                | CoreError::Shape(_)
                | CoreError::Parse(_)
                | CoreError::InsufficientData { .. }
                | CoreError::SingularArgument { .. }
                | CoreError::DegenerateData(_) => EXIT_USAGE,
                CoreError::Io(_) => EXIT_IO,
                CoreError::Accuracy { .. }
                | CoreError::Conditioning(_)
                | CoreError::Embedding { .. }
                | CoreError::DegenerateInformation
                | CoreError::AllReplicationsFailed => EXIT_NUMERIC,
            },
        }
    }

    /// Message for stderr. Domain errors name the offending flag.
    pub fn message(&self) -> String {
        match self {
            CliError::Core(CoreError::Domain { name, reason }) => {
                format!("--{}: {reason}", name.to_lowercase().replace('_', "-"))
            }
            other => other.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        let d = CliError::Core(CoreError::Domain {
            name: "truncation_K",
            reason: "must be at least 1".into(),
        });
        assert_eq!(d.exit_code(), EXIT_USAGE);
        assert_eq!(d.message(), "--truncation-k: must be at least 1");
        assert_eq!(
            CliError::Core(CoreError::Io(std::io::Error::other("x"))).exit_code(),
            EXIT_IO
        );
        assert_eq!(
            CliError::Core(CoreError::Conditioning(1e13)).exit_code(),
            EXIT_NUMERIC
        );
        assert_eq!(
            CliError::ChecksFailed("x".into()).exit_code(),
            EXIT_CHECKS_FAILED
        );
    }
}
