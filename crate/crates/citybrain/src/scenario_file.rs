//! JSON scenario documents.
//!
//! A document is a scenario object plus a mandatory top-level
//! `schema_version`. Unknown fields are rejected everywhere.

use std::fmt;
use std::path::Path;

use citybrain_core::scenario::{IssueKind, Scenario, ScenarioIssue};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersionUnsupported { found: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{}", Issues(.0))]
    Invalid(Vec<ScenarioIssue>),
}

struct Issues<'a>(&'a [ScenarioIssue]);

impl fmt::Display for Issues<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl ScenarioError {
    /// Machine-readable `(path, message)` pairs, one per problem.
    pub fn located(&self) -> Vec<(String, String)> {
        match self {
            ScenarioError::Io { source, .. } => vec![(String::from("file"), format!("cannot read: {source}"))],
            ScenarioError::Syntax { line, column, message } => {
                vec![(format!("line {line}, column {column}"), message.clone())]
            }
            ScenarioError::SchemaVersionUnsupported { .. } => {
                vec![(String::from("schema_version"), self.to_string())]
            }
            ScenarioError::Schema { path, message } => vec![(path.clone(), message.clone())],
            ScenarioError::Invalid(issues) => issues.iter().map(|i| (i.path.clone(), i.message.clone())).collect(),
        }
    }

    pub fn has_kind(&self, kind: IssueKind) -> bool {
        matches!(self, ScenarioError::Invalid(issues) if issues.iter().any(|i| i.kind == kind))
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario = parse_unvalidated(text)?;
    scenario.validate().map_err(ScenarioError::Invalid)?;
    Ok(scenario)
}

/// Parses a document without the cross-reference checks.
pub fn parse_unvalidated(text: &str) -> Result<Scenario, ScenarioError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| ScenarioError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Some(object) = value.as_object_mut() else {
        return Err(ScenarioError::Schema { path: String::from("."), message: String::from("expected an object") });
    };
    match object.remove("schema_version") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => return Err(ScenarioError::SchemaVersionUnsupported { found: other.to_string() }),
        None => return Err(ScenarioError::SchemaVersionUnsupported { found: String::from("(missing)") }),
    }
    serde_path_to_error::deserialize(value).map_err(|e| ScenarioError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    parse_scenario(&text)
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    schema_version: u64,
    #[serde(flatten)]
    scenario: &'a Scenario,
}

/// Pretty-printed document text, newline-terminated.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    let mut text = serde_json::to_string_pretty(&DocumentOut { schema_version: SCHEMA_VERSION, scenario })
        .expect("scenario values always serialize");
    text.push('\n');
    text
}

/// Scenario documents shipped with the crate.
pub mod fixtures {
    pub const FIRE_ALARM: &str = include_str!("../scenarios/fire-alarm.json");
    pub const DATACENTER: &str = include_str!("../scenarios/datacenter.json");
    pub const NINE_ARCS: &str = include_str!("../scenarios/nine-arcs.json");
    pub const PERFECT_CITY: &str = include_str!("../scenarios/perfect-city.json");
    pub const TRUNCATED_HORIZON: &str = include_str!("../scenarios/truncated-horizon.json");
    pub const MINIMAL: &str = include_str!("../scenarios/minimal.json");

    pub const ALL: [(&str, &str); 6] = [
        ("fire-alarm", FIRE_ALARM),
        ("datacenter", DATACENTER),
        ("nine-arcs", NINE_ARCS),
        ("perfect-city", PERFECT_CITY),
        ("truncated-horizon", TRUNCATED_HORIZON),
        ("minimal", MINIMAL),
    ];
}
