//! Scenario files, event-log persistence, City IQ reports and the
//! `citybrain` command line, on top of `citybrain-core`.

pub mod cli;
pub mod log_io;
pub mod report;
pub mod scenario_file;

pub use log_io::{log_digest, read_log, write_log, LogError};
pub use report::{emit_report, parse_structured, ReportBundle, ReportFormat};
pub use scenario_file::{parse_scenario, serialize_scenario, ScenarioError};
