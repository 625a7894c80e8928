//! Error kinds mapped to distinct process exit codes.

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad or missing configuration; nothing was started.
    #[error("config error: {0}")]
    Config(String),
    /// Filesystem failure.
    #[error("io error: {0}")]
    Io(String),
    /// Inputs were readable but inconsistent (id mismatches, corrupt
    /// labels, impossible scenes).
    #[error("validation error: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> CliError {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}
