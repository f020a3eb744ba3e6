//! Command line and HTTP front ends for `tabaudit`.

pub mod commands;
pub mod options;
pub mod server;

use std::path::{Path, PathBuf};

pub use options::{SessionOptions, TextMode};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tabaudit::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit code: 2 for configuration problems, 3 for unreadable
    /// or inconsistent data, 4 for anything else.
    pub fn exit_code(&self) -> u8 {
        use tabaudit::Error as E;
        match self {
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                E::Config(_) | E::BudgetExhausted(_) | E::BadPlan(_) => 2,
                E::Io { .. }
                | E::Csv(_)
                | E::RaggedRows { .. }
                | E::EmptyTable
                | E::ShapeMismatch(_)
                | E::Decode(_)
                | E::VersionMismatch { .. } => 3,
                _ => 4,
            },
        }
    }
}
