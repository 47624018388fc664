use minkflat_core::error::Error as CoreError;
use serde_json::json;

/// Failures of a run, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error{}: {message}", field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Config { field: Option<String>, message: String },
    #[error("hypothesis check failed: {message}")]
    Hypothesis { message: String, k: Option<usize> },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    pub fn config(field: Option<&str>, message: impl Into<String>) -> Self {
        LabError::Config { field: field.map(str::to_string), message: message.into() }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            LabError::Config { field, .. } => field.as_deref(),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config { .. } => 2,
            LabError::Hypothesis { .. } => 3,
            LabError::Construction(_) => 4,
            LabError::Io(_) => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            LabError::Config { .. } => "config",
            LabError::Hypothesis { .. } => "hypothesis",
            LabError::Construction(_) => "construction",
            LabError::Io(_) => "io",
        };
        let mut v = json!({ "error": kind, "exit_code": self.exit_code(), "message": self.to_string() });
        if let Some(f) = self.field() {
            v["field"] = json!(f);
        }
        if let LabError::Hypothesis { k: Some(k), .. } = self {
            v["k"] = json!(k);
        }
        v
    }
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Argument(m) => LabError::Config { field: None, message: m },
            CoreError::Validation(_) | CoreError::Precondition(_) => {
                LabError::Hypothesis { message: e.to_string(), k: None }
            }
            other => LabError::Construction(other.to_string()),
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
