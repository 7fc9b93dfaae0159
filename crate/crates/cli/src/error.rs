use dkern::KernelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config at `{path}`: {reason}")]
    Config { path: String, reason: String },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "CONFIG_INVALID",
            CliError::Kernel(e) => e.code(),
            CliError::Io(_) => "IO_ERROR",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Kernel(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// `{"error":{"code":..,"message":..}}`, plus `path` for config errors.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = serde_json::json!({ "code": self.code(), "message": self.to_string() });
        if let CliError::Config { path, .. } = self {
            body["path"] = serde_json::Value::String(path.clone());
        }
        serde_json::json!({ "error": body })
    }
}
