//! Command-line driver: parses an experiment config, runs solves, sweeps,
//! rate fits, verifications, or annealing chains, and emits CSV and JSON
//! artifacts.
//!
//! Exit codes: 0 on success, 1 on numerical or check failure, 2 on config
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod commands;
mod config;
mod output;

use commands::RunContext;
use config::Quantity;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl From<sdot_core::Error> for CliError {
    fn from(e: sdot_core::Error) -> Self {
        use sdot_core::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::NonPositiveEpsilon(_)
            | E::DimensionMismatch(_)
            | E::NotOneDimensional
            | E::ClosedFormInstance => CliError::Config(e.to_string()),
            E::NonFiniteAtNode { .. }
            | E::SingularSystem
            | E::BoundaryPoint
            | E::SolverFailure(_) => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports and data files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed of a random target.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct QuantityArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// psi_dot_norm | psi_gap_to_zero_eps | cost_gap_residual
    #[arg(long)]
    quantity: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the dual problem at one regularization (or along a schedule).
    Solve(CommonArgs),
    /// Evaluate a quantity over the regularization grid; emits CSV.
    Sweep(QuantityArgs),
    /// Run a sweep and fit its log-log slope; emits JSON.
    Rate(QuantityArgs),
    /// Run the verification suite against the solved potential.
    Check(CommonArgs),
    /// Warm-started solve chain along the schedule.
    Anneal(CommonArgs),
}

#[derive(Parser, Debug)]
#[command(name = "sdot", version, about = "Semi-discrete entropic optimal transport driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => {
            let ctx = RunContext::load(&a.config, &a.out, a.seed)?;
            commands::cmd_solve(&ctx)
        }
        Command::Sweep(a) => {
            let q = Quantity::parse(&a.quantity)?;
            let ctx = RunContext::load(&a.common.config, &a.common.out, a.common.seed)?;
            commands::cmd_sweep(&ctx, q)
        }
        Command::Rate(a) => {
            let q = Quantity::parse(&a.quantity)?;
            let ctx = RunContext::load(&a.common.config, &a.common.out, a.common.seed)?;
            commands::cmd_rate(&ctx, q)
        }
        Command::Check(a) => {
            let ctx = RunContext::load(&a.config, &a.out, a.seed)?;
            commands::cmd_check(&ctx)
        }
        Command::Anneal(a) => {
            let ctx = RunContext::load(&a.config, &a.out, a.seed)?;
            commands::cmd_anneal(&ctx)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
    }
}
