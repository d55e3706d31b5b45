//! Scenario runner for the anchorhash workspace.
//!
//! Replays a churn script (or a synthesized default) against one
//! algorithm, measuring balance, lookup complexity, update cost and
//! throughput, and writes a CSV or JSON report.
//!
//! Exit codes: 0 success, 2 script parse error, 3 execution error,
//! 4 snapshot/report integrity error.

mod runner;
mod script;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use runner::{Algo, RunError, Runner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "anchorhash",
    version,
    about = "Consistent-hashing scenario runner: replays churn scripts and reports balance, disruption, complexity and throughput"
)]
struct Cli {
    /// Algorithm to drive.
    #[arg(long, value_enum, default_value_t = Algo::Anchor)]
    algo: Algo,

    /// Anchor capacity (anchor-family algorithms, flag mode).
    #[arg(long)]
    a: Option<u32>,

    /// Working-set size (anchor family) or resource count (baselines) in
    /// flag mode.
    #[arg(long)]
    w: Option<u32>,

    /// Seed for every derived stream; fixes all non-wall-clock output.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Default key-sample size for probes and measurements.
    #[arg(long, default_value_t = 10_000)]
    keys: usize,

    /// Points per resource (ring only).
    #[arg(long, default_value_t = 100)]
    copies: u32,

    /// Lookup-table size (maglev only); must be prime and at least 100x
    /// the resource count. Defaults to the smallest such prime.
    #[arg(long)]
    table_size: Option<u64>,

    /// Scenario script; omit to synthesize `init` + `measure all` from
    /// the flags above.
    #[arg(long)]
    script: Option<PathBuf>,

    /// Report destination (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("{message}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let (text, scenario) = match &cli.script {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                (2, format!("parse error: cannot read script {}: {e}", path.display()))
            })?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into());
            (text, stem)
        }
        None => (synthesize(&cli), "adhoc".to_string()),
    };
    let events = script::parse(&text).map_err(|e| (2, format!("parse error: {e}")))?;

    let runner = Runner::new(cli.algo, cli.seed, cli.copies, cli.table_size, cli.keys, &scenario);
    let report = runner.run(&events).map_err(|e| match e {
        RunError::Exec { event, message } => (3, format!("execution error: event {event}: {message}")),
        RunError::Integrity(err) => (4, format!("integrity error: {err}")),
    })?;

    let body = match cli.format {
        Format::Csv => report.to_csv_string(),
        Format::Json => report.to_json_string(),
    }
    .map_err(|e| (4, format!("integrity error: {e}")))?;

    match &cli.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| (4, format!("integrity error: cannot write {}: {e}", path.display())))?,
        None => {
            print!("{body}");
            std::io::stdout().flush().ok();
        }
    }
    Ok(())
}

/// Flag mode: one init sized from the flags, then a full measurement.
fn synthesize(cli: &Cli) -> String {
    let mut text = String::new();
    match cli.algo {
        Algo::Anchor | Algo::AnchorNaive | Algo::AnchorReduced => {
            let a = cli.a.unwrap_or(1024);
            let w = cli.w.unwrap_or(a);
            text.push_str(&format!("init a={a} w={w}\n"));
        }
        Algo::Hrw | Algo::Ring | Algo::Maglev => {
            let n = cli.w.unwrap_or(100);
            let names: Vec<String> = (0..n).map(|i| format!("r{i:04}")).collect();
            text.push_str(&format!("init resources={}\n", names.join(",")));
        }
    }
    text.push_str(&format!("measure all keys={}\n", cli.keys));
    text
}
