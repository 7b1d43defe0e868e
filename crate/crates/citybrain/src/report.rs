//! City IQ report bundles: a score, the digest of the log it was computed
//! from, and the two text forms.

use std::fmt::Write as _;

use citybrain_core::iq::{compute_city_iq, CityIqReport, IndexScore, IqError};
use citybrain_core::{EventLog, Scenario, ScaleParams, SimTime, Window};
use serde::{Deserialize, Serialize};

use crate::log_io::log_digest;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportBundle {
    pub city_iq_report: CityIqReport,
    /// SHA-256 of the event log the report was computed from.
    pub run_digest: String,
    pub scenario_name: String,
    /// `None` when the log was read from a file.
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Table,
    Structured,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Iq(#[from] IqError),
    #[error("scenario graph: {0}")]
    Graph(#[from] citybrain_core::graph::GraphError),
}

/// Scores `log` against the scenario's graph and census over `[0, horizon]`.
pub fn score_log(scenario: &Scenario, log: &EventLog, params: &ScaleParams) -> Result<CityIqReport, ReportError> {
    let graph = scenario.build_graph()?;
    let window = Window::new(SimTime::ZERO, scenario.metadata.horizon);
    Ok(compute_city_iq(&graph, log, &scenario.census, params, window)?)
}

pub fn bundle(scenario: &Scenario, log: &EventLog, params: &ScaleParams, seed: Option<u64>) -> Result<ReportBundle, ReportError> {
    Ok(ReportBundle {
        city_iq_report: score_log(scenario, log, params)?,
        run_digest: log_digest(log),
        scenario_name: scenario.metadata.name.clone(),
        seed,
    })
}

pub fn emit_report(bundle: &ReportBundle, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => emit_table(bundle),
        ReportFormat::Structured => {
            let mut s = serde_json::to_string_pretty(bundle).expect("reports always serialize");
            s.push('\n');
            s
        }
    }
}

pub fn parse_structured(text: &str) -> Result<ReportBundle, serde_path_to_error::Error<serde_json::Error>> {
    serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_str(text))
}

const LABEL_WIDTH: usize = 44;

fn row(out: &mut String, depth: usize, label: &str, value: &str) {
    let indent = "    ".repeat(depth);
    let width = LABEL_WIDTH.saturating_sub(indent.len());
    let _ = writeln!(out, "{indent}{label:<width$}{value}");
}

fn index_cell(score: IndexScore) -> String {
    if score.is_no_data() {
        String::from("no data")
    } else {
        format!("{:.4}  (n={})", score.value, score.sample_count)
    }
}

/// Three nested levels: the two level-1 groups, their level-2 indexes and
/// the level-3 measurements under each arc category. The final line is
/// `City IQ: NN.NN`.
fn emit_table(bundle: &ReportBundle) -> String {
    let r = &bundle.city_iq_report;
    let mut out = String::new();
    let _ = writeln!(out, "City IQ Test Scale (version {})", r.scale_version);
    let _ = writeln!(out, "scenario: {}", bundle.scenario_name);
    match bundle.seed {
        Some(seed) => {
            let _ = writeln!(out, "seed: {seed}");
        }
        None => {
            let _ = writeln!(out, "seed: (log file)");
        }
    }
    let _ = writeln!(out, "log sha256: {}", bundle.run_digest);
    out.push('\n');

    row(&mut out, 0, "Cloud neural network", &format!("{:.4}", r.level1.network_score));
    let n = &r.network_indexes;
    row(&mut out, 1, "Completeness (robustness)", &index_cell(n.robustness));
    row(&mut out, 1, "Uniformity", &index_cell(n.uniformity));
    row(&mut out, 1, "Coverage", &index_cell(n.coverage));
    row(&mut out, 1, "Activeness", &index_cell(n.activeness));

    row(&mut out, 0, "Cloud reflex arcs", &format!("{:.4}", r.level1.arc_score));
    for a in &r.arc_indexes {
        let score = a.score.map_or_else(|| String::from("excluded"), |s| format!("{s:.4}"));
        row(&mut out, 1, a.category.as_str(), &score);
        row(&mut out, 2, "Response speed", &index_cell(a.response_speed));
        row(&mut out, 2, "Stability (robustness)", &index_cell(a.robustness));
    }
    out.push('\n');
    let _ = writeln!(out, "City IQ: {:.2}", r.city_iq);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario_file::{fixtures, parse_scenario};

    fn fire_alarm_bundle() -> ReportBundle {
        let s = parse_scenario(fixtures::FIRE_ALARM).unwrap();
        let log = citybrain_core::run(&s, 7).unwrap();
        bundle(&s, &log, &s.scale, Some(7)).unwrap()
    }

    #[test]
    fn structured_round_trip() {
        let b = fire_alarm_bundle();
        let text = emit_report(&b, ReportFormat::Structured);
        assert_eq!(parse_structured(&text).unwrap(), b);
    }

    #[test]
    fn table_ends_with_score_line() {
        let b = fire_alarm_bundle();
        let text = emit_report(&b, ReportFormat::Table);
        let last = text.lines().last().unwrap();
        assert_eq!(last, format!("City IQ: {:.2}", b.city_iq_report.city_iq));
    }

    #[test]
    fn unknown_report_fields_rejected() {
        let b = fire_alarm_bundle();
        let text = emit_report(&b, ReportFormat::Structured).replacen("\"seed\"", "\"sead\"", 1);
        assert!(parse_structured(&text).is_err());
    }
}
