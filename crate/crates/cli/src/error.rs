use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] histories::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 when the engine refused an uncertified set, 1 for everything else.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(histories::Error::NotCertified { .. }) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(histories::Error::NotCertified { .. }) => "certification_refused",
            CliError::Core(_) | CliError::Config(_) => "validation",
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => "io",
        }
    }
}
