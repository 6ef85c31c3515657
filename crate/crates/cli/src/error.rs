use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INTERNAL: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const DIVERGED: u8 = 3;
    pub const BREACH: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver did not converge: {0}")]
    Diverged(String),
    #[error("verification margin breached: {0}")]
    Breach(String),
    #[error(transparent)]
    Internal(#[from] anyhow::Error),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.into())
    }
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Diverged(_) => exit::DIVERGED,
            CliError::Breach(_) => exit::BREACH,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config_error",
            CliError::Diverged(_) => "diverged",
            CliError::Breach(_) => "margin_breach",
            CliError::Internal(_) => "internal_error",
        }
    }
}
