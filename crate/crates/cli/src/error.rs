use std::fmt;
use std::path::{Path, PathBuf};

use cpi_core::CpiError;
use thiserror::Error;

/// A validation problem at a dotted config path such as `geometry.z_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config syntax error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },

    #[error("invalid config:{}", .0.iter().map(|e| format!("\n  {e}")).collect::<String>())]
    Validation(Vec<FieldError>),

    #[error(transparent)]
    Core(#[from] CpiError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn field(path: &str, message: impl Into<String>) -> Self {
        CliError::Validation(vec![FieldError {
            path: path.to_string(),
            message: message.into(),
        }])
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for config errors, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 4,
        }
    }
}
