use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("snapshot format error: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] tdse_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 3 for numerical failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_configuration() => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(
            CliError::Core(tdse_core::Error::Numerical("pivot".into())).exit_code(),
            3
        );
        assert_eq!(
            CliError::Core(tdse_core::Error::Grid("J".into())).exit_code(),
            2
        );
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Format("x".into()).exit_code(), 2);
    }
}
