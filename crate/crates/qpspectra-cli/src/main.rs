//! `qpspectra` — batch front end for the quasi-parabolic spectra toolkit.
//!
//! Subcommands: `spectrum`, `series`, `range`, `vmo`, `validate`; each takes
//! a JSON job configuration. Exit codes: 0 success, 2 configuration error,
//! 3 infeasible symbol, 4 incommensurable grid, 5 validation failure.

// NaN-rejecting validations use negated comparisons deliberately.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod pipeline;
mod render;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use pipeline::{exit_code, Job, PipelineError};

#[derive(Parser)]
#[command(
    name = "qpspectra",
    version,
    about = "Quasi-parabolic composition operators: ranges, operator series, essential spectra, and diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Essential-spectrum point cloud and curves for the configured symbol.
    Spectrum(JobArgs),
    /// Series plan, assembled-operator statistics, and the error budget.
    Series(JobArgs),
    /// Occupancy estimate of the local essential range at infinity.
    Range(JobArgs),
    /// Mean-oscillation profile of the symbol's disk transport.
    Vmo(JobArgs),
    /// Full acceptance suite with pass/fail per criterion.
    Validate(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Path to the JSON job configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides outputs.dir from the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force the uniform grid spacing; must divide every symbol shift.
    #[arg(long = "seed-grid")]
    seed_grid: Option<f64>,
}

fn build_job(args: &JobArgs) -> Result<Job, PipelineError> {
    let raw = std::fs::read(&args.config).map_err(|e| {
        PipelineError::Config(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let text = String::from_utf8(raw.clone())
        .map_err(|e| PipelineError::Config(format!("config is not UTF-8: {e}")))?;
    let config = config::parse_config(&text).map_err(|e| PipelineError::Config(e.0))?;
    let mut hasher = Sha256::new();
    hasher.update(&raw);
    let config_sha256 = format!("{:x}", hasher.finalize());
    let out_dir = args.out.clone().unwrap_or_else(|| config.outputs.dir.clone());
    Ok(Job {
        config,
        config_sha256,
        out_dir,
        seed_grid: args.seed_grid,
    })
}

type Runner = fn(&Job) -> Result<i32, PipelineError>;

fn run() -> Result<i32, PipelineError> {
    let cli = Cli::parse();
    let (args, runner): (&JobArgs, Runner) = match &cli.cmd {
        Cmd::Spectrum(a) => (a, pipeline::run_spectrum),
        Cmd::Series(a) => (a, pipeline::run_series),
        Cmd::Range(a) => (a, pipeline::run_range),
        Cmd::Vmo(a) => (a, pipeline::run_vmo),
        Cmd::Validate(a) => (a, pipeline::run_validate),
    };
    let job = build_job(args)?;
    runner(&job)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qpspectra: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
