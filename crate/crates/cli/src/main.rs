//! `ness`: parameter sweeps, the verification battery and figure panels.

use clap::{Parser, Subcommand};
use ness_core::harness::config::{PipelineChoice, RunConfig};
use ness_core::harness::sweep::{emit_csv, run_sweep, write_csv, SweepTable};
use ness_core::harness::{figures, verify};
use ness_core::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Environment variable holding the worker-thread count.
const THREADS_VAR: &str = "NESS_THREADS";

#[derive(Parser)]
#[command(name = "ness", version, about = "Correlations and entanglement across a biased impurity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a JSON configuration.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; overrides the configuration, stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// numeric, analytic or both; overrides the configuration.
        #[arg(long)]
        pipeline: Option<PipelineChoice>,
    },
    /// Run the verification battery.
    Verify {
        /// Smaller grids, same tolerances.
        #[arg(long)]
        fast: bool,
    },
    /// Reproduce a figure panel from its checked-in configuration.
    Figure {
        /// Panel id: 2a..2d, 3a..3d, 4a, 4b, 5a..5d.
        id: String,
        /// Directory for the per-curve CSV files.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
}

/// Exit status: 0 success, 1 row or check failure, 2 configuration error.
enum Failure {
    Rows(String),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter(_) => Failure::Config(e.to_string()),
            other => Failure::Rows(other.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))
}

fn report_rows(table: &SweepTable, what: &str) -> Result<(), Failure> {
    for row in table.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("{what}: row delta_d = {}: {}", row.delta_d, row.error.as_deref().unwrap_or_default());
    }
    match table.failed_rows() {
        0 => Ok(()),
        n => Err(Failure::Rows(format!("{what}: {n} of {} rows failed", table.rows.len()))),
    }
}

fn sweep(config: &Path, out: Option<PathBuf>, pipeline: Option<PipelineChoice>) -> Result<(), Failure> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(p) = pipeline {
        cfg.pipeline = p;
    }
    let table = run_sweep(&cfg)?;
    match out.or_else(|| cfg.output.clone()) {
        Some(path) => emit_csv(&table, &path).map_err(|e| Failure::Rows(e.to_string()))?,
        None => write_csv(&table, std::io::stdout().lock()).map_err(|e| Failure::Rows(e.to_string()))?,
    }
    report_rows(&table, &cfg.name)
}

fn figure(id: &str, out: &Path) -> Result<(), Failure> {
    let fig = figures::figure_config(id)?;
    eprintln!("figure {}: {}", fig.figure, fig.description);
    let mut failed = Vec::new();
    for run in &fig.runs {
        let table = run_sweep(run)?;
        let path = out.join(format!("fig{}_{}.csv", fig.figure, run.name));
        emit_csv(&table, &path).map_err(|e| Failure::Rows(e.to_string()))?;
        eprintln!("wrote {}", path.display());
        if let Err(Failure::Rows(msg) | Failure::Config(msg)) = report_rows(&table, &run.name) {
            failed.push(msg);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Rows(failed.join("; ")))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Sweep { config, out, pipeline } => sweep(&config, out, pipeline),
        Command::Verify { fast } => {
            let report = verify::verify_suite(fast);
            println!("{report}");
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Rows(format!("{} checks failed", report.failures())))
            }
        }
        Command::Figure { id, out } => figure(&id, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rows(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}
