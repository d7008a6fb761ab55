//! CLI error classification: input problems exit 1, internal failures 2.

use std::fmt;

use glil::GlilError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config, or a mathematical domain violation.
    Input(String),
    /// IO failures, serialization failures, solver non-convergence.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<GlilError> for CliError {
    fn from(e: GlilError) -> Self {
        match e {
            GlilError::Convergence(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}
