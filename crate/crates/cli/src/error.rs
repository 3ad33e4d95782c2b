use std::fmt;

use simplikit_core::corpus::CorpusError;
use simplikit_core::gateway::GatewayError;
use simplikit_core::validator::ValidationError;

pub const BAD_CONFIG: u8 = 2;
pub const BACKEND_FAILURE: u8 = 3;
pub const VALIDATION_INFRA: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Invalid flags, config files or inputs.
    Config(String),
    /// A generator backend failed or was unreachable.
    Backend(String),
    /// Building or testing a project could not run.
    Infra(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => BAD_CONFIG,
            CliError::Backend(_) => BACKEND_FAILURE,
            CliError::Infra(_) => VALIDATION_INFRA,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "bad configuration: {m}"),
            CliError::Backend(m) => write!(f, "backend failure: {m}"),
            CliError::Infra(m) => write!(f, "validation infrastructure failure: {m}"),
        }
    }
}

impl From<GatewayError> for CliError {
    fn from(e: GatewayError) -> Self {
        match e {
            GatewayError::UnknownBackend(_) | GatewayError::InvalidRequest(_) => CliError::Config(e.to_string()),
            _ => CliError::Backend(e.to_string()),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        match e {
            ValidationError::Config(_) => CliError::Config(e.to_string()),
            _ => CliError::Infra(e.to_string()),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub fn read_input(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(GatewayError::UnknownBackend("x".into())).code(), 2);
        assert_eq!(CliError::from(GatewayError::Unreachable("x".into())).code(), 3);
        assert_eq!(CliError::from(ValidationError::Config("x".into())).code(), 2);
        assert_eq!(CliError::Infra("x".into()).code(), 4);
    }
}
