//! `citybrain` command line.
//!
//! Exit codes: 0 success, 1 runtime error, 2 invalid input.

use std::ffi::OsString;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use citybrain_core::iq::STANDARD_CATEGORIES;
use citybrain_core::{run, ArcType, EventLog, RunSummary, ScaleParams, Scenario};
use clap::{Parser, Subcommand};

use crate::log_io::{log_digest, read_log, write_log};
use crate::report::{bundle, emit_report, ReportFormat};
use crate::scenario_file::load_scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "citybrain", version, about = "City Brain reflex-arc simulator and City IQ scorer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a scenario file.
    Validate { scenario: PathBuf },
    /// Run a scenario and print outcome counts.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value_t = 0, conflicts_with = "seeds")]
        seed: u64,
        /// Sweep seeds `a..b` (half-open) or `a..=b`.
        #[arg(long)]
        seeds: Option<SeedRange>,
        /// Write the event log here. With --seeds, `-seed<N>` is added
        /// before the extension.
        #[arg(long)]
        log_out: Option<PathBuf>,
    },
    /// Compute the City IQ report from a fresh run or a saved log.
    Score {
        scenario: PathBuf,
        #[arg(long, conflicts_with = "log_in")]
        seed: Option<u64>,
        #[arg(long)]
        log_in: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
        /// JSON file replacing the scenario's scale parameters.
        #[arg(long)]
        scale_params: Option<PathBuf>,
    },
    /// Print the nine arc types and the standard arc categories.
    ListArcTypes,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedRange(pub Range<u64>);

impl FromStr for SeedRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected a..b or a..=b, got `{s}`");
        let (lo, hi, inclusive) = if let Some((a, b)) = s.split_once("..=") {
            (a, b, true)
        } else if let Some((a, b)) = s.split_once("..") {
            (a, b, false)
        } else {
            return Err(bad());
        };
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        let end = if inclusive { hi.checked_add(1).ok_or_else(bad)? } else { hi };
        if end <= lo {
            return Err(format!("seed range `{s}` is empty"));
        }
        Ok(SeedRange(lo..end))
    }
}

/// Runs the CLI with explicit output streams; returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate { scenario } => cmd_validate(&scenario, out),
        Command::Run { scenario, seed, seeds, log_out } => {
            let seeds = seeds.map_or(seed..seed + 1, |r| r.0);
            cmd_run(&scenario, seeds, log_out.as_deref(), out)
        }
        Command::Score { scenario, seed, log_in, format, scale_params } => {
            cmd_score(&scenario, seed.unwrap_or(0), log_in.as_deref(), format, scale_params.as_deref(), out)
        }
        Command::ListArcTypes => cmd_list_arc_types(out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            for line in failure.lines {
                let _ = writeln!(err, "error: {line}");
            }
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    lines: Vec<String>,
}

impl Failure {
    fn invalid(message: impl ToString) -> Self {
        Failure { code: EXIT_INVALID, lines: vec![message.to_string()] }
    }

    fn runtime(message: impl ToString) -> Self {
        Failure { code: EXIT_RUNTIME, lines: vec![message.to_string()] }
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    load_scenario(path).map_err(|e| Failure {
        code: EXIT_INVALID,
        lines: e.located().into_iter().map(|(p, m)| format!("{}: {p}: {m}", path.display())).collect(),
    })
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let s = load(path)?;
    let _ = writeln!(
        out,
        "{}: valid ({} neurons, {} channels, {} arcs, {} stimuli)",
        s.metadata.name,
        s.neurons.len(),
        s.channels.len(),
        s.arcs.len(),
        s.stimuli.len()
    );
    Ok(())
}

fn seeded_path(base: &Path, seed: u64) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}-seed{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}-seed{seed}"),
    };
    base.with_file_name(name)
}

fn cmd_run(path: &Path, seeds: Range<u64>, log_out: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let scenario = load(path)?;
    let sweep = seeds.end - seeds.start > 1;
    // independent runs; results are printed in seed order
    let logs: Vec<(u64, Result<EventLog, String>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .clone()
            .map(|seed| {
                let scenario = &scenario;
                (seed, scope.spawn(move || run(scenario, seed).map_err(|e| e.to_string())))
            })
            .collect();
        handles.into_iter().map(|(seed, h)| (seed, h.join().expect("run thread panicked"))).collect()
    });
    for (seed, log) in logs {
        let log = log.map_err(Failure::runtime)?;
        if let Some(base) = log_out {
            let target = if sweep { seeded_path(base, seed) } else { base.to_path_buf() };
            write_log(&log, &target).map_err(Failure::runtime)?;
        }
        let s = RunSummary::from_log(&log);
        let _ = writeln!(out, "scenario: {}", scenario.metadata.name);
        let _ = writeln!(out, "seed: {seed}");
        let _ = writeln!(
            out,
            "traces: {} (completed {}, suppressed {}, failed {})",
            s.traces(),
            s.completed,
            s.suppressed,
            s.failed
        );
        let _ = writeln!(
            out,
            "messages: {} sent, {} delivered, {} dropped ({} at horizon)",
            s.sent, s.delivered, s.dropped, s.dropped_at_horizon
        );
        let _ = writeln!(out, "actuations: {}", s.actuations);
        let _ = writeln!(out, "log sha256: {}", log_digest(&log));
    }
    Ok(())
}

fn load_scale(path: &Path) -> Result<ScaleParams, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let params: ScaleParams = serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_str(&text))
        .map_err(|e| Failure::invalid(format!("{}: {}: {}", path.display(), e.path(), e.inner())))?;
    params.validate().map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    Ok(params)
}

fn cmd_score(
    path: &Path,
    seed: u64,
    log_in: Option<&Path>,
    format: ReportFormat,
    scale_params: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let scenario = load(path)?;
    let params = match scale_params {
        Some(p) => load_scale(p)?,
        None => scenario.scale.clone(),
    };
    let (log, seed) = match log_in {
        Some(p) => (read_log(p).map_err(Failure::invalid)?, None),
        None => (run(&scenario, seed).map_err(Failure::runtime)?, Some(seed)),
    };
    let b = bundle(&scenario, &log, &params, seed).map_err(Failure::invalid)?;
    let _ = out.write_all(emit_report(&b, format).as_bytes());
    Ok(())
}

fn cmd_list_arc_types(out: &mut dyn Write) -> Result<(), Failure> {
    let _ = writeln!(out, "Reflex arc types");
    for t in ArcType::ALL {
        let _ = writeln!(out, "  {}  {:<5} {:<34} {}", t.ordinal(), t.label(), t.description(), t.example());
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "Standard arc categories");
    for (i, name) in STANDARD_CATEGORIES.iter().enumerate() {
        let _ = writeln!(out, "  {:>2}  {name}", i + 1);
    }
    Ok(())
}
