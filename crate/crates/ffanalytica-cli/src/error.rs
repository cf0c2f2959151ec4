use thiserror::Error;

/// CLI failures. Each maps to a fixed process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Capacity(String),
    /// carries a JSON dump of the residuals that missed tolerance
    #[error("{message} (residual {residual:e})")]
    Numeric { message: String, residual: f64, dump: serde_json::Value },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Numeric { .. } => 4,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}

impl From<ffanalytica::Error> for CliError {
    fn from(e: ffanalytica::Error) -> Self {
        use ffanalytica::Error as E;
        match e {
            E::Usage(m) => CliError::Usage(m),
            // out-of-domain input is still a bad invocation from the CLI's side
            E::Domain(m) => CliError::Usage(m),
            E::Capacity(m) => CliError::Capacity(m),
            E::Numeric { message, residual } => {
                let dump = serde_json::json!({ "message": message, "residual": residual });
                CliError::Numeric { message, residual, dump }
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}
