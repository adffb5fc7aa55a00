use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown experiment '{0}'; valid names: {names}", names = crate::registry::names().join(", "))]
    UnknownExperiment(String),
    /// A violated constraint and the statement it comes from.
    #[error("precondition violated: {constraint}, {anchor}")]
    Precondition { constraint: String, anchor: &'static str },
    #[error(transparent)]
    Core(#[from] wavelab_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) | Self::Csv(_) | Self::Json(_) => 3,
            _ => 2,
        }
    }
}
