use serde_json::{json, Value};

use nsaspec::io::SCHEMA_VERSION;

/// Everything a command can fail with, mapped onto the process exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("selftest failed: criteria {0:?}")]
    Selftest(Vec<u32>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Selftest(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
            CliError::Selftest(_) => "selftest",
        }
    }

    /// Structured form written to stderr under `--json-errors`.
    pub fn to_json(&self) -> Value {
        let mut err = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        match self {
            CliError::Parse { line, column, .. } => {
                err["line"] = json!(line);
                err["column"] = json!(column);
            }
            CliError::Selftest(ids) => err["failed"] = json!(ids),
            _ => {}
        }
        json!({ "schema_version": SCHEMA_VERSION, "error": err })
    }

    /// Library errors raised while building a system from a spec are
    /// validation failures regardless of their kind.
    pub fn validation(e: nsaspec::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<nsaspec::Error> for CliError {
    fn from(e: nsaspec::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
