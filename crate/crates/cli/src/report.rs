use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "qfim-dim.report.v1";
pub const TOOL: &str = "qfim-dim";

/// Where the analysed state came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub path: String,
    pub kind: String,
    pub dims: Vec<usize>,
}

/// Versioned JSON envelope around every command result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub input: Option<InputDescriptor>,
    pub parameters: Value,
    pub results: Value,
    pub seed: Option<u64>,
    /// Seconds since the epoch; the only field allowed to differ between identical runs.
    pub generated_unix: u64,
}

impl ReportDocument {
    pub fn new(command: &str, input: Option<InputDescriptor>, parameters: Value, results: Value, seed: Option<u64>) -> Self {
        let generated_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            tool: TOOL.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            input,
            parameters,
            results,
            seed,
            generated_unix,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
