use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1.0";

/// Machine-readable output of every command. Contains no timestamps, so
/// identical inputs give byte-identical documents.
///
/// Non-finite floats (e.g. an undefined AICc) are written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    /// Every flag value in effect, plus the dataset identity when there is one.
    pub inputs: Value,
    pub results: Value,
}

impl ReportDocument {
    pub fn new(command: &str, inputs: impl Serialize, results: impl Serialize) -> serde_json::Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            inputs: serde_json::to_value(inputs)?,
            results: serde_json::to_value(results)?,
        })
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
