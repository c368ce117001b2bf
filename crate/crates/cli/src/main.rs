//! `wtfb`: bound evaluation, binary sweeps, simulations and self-checks.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input, 3 infeasible
//! simulation rates. `WTFB_THREADS` caps the worker pool.

mod bounds_cmd;
mod check_cmd;
mod error;
mod grid;
mod manifest;
mod plot;
mod simulate_cmd;
mod sweep_cmd;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use wtfb::{BinaryWiretapParams, OptimizerConfig};

use error::CliError;

#[derive(Parser)]
#[command(name = "wtfb", version, about = "Secrecy bounds for wiretap channels with feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate bounds on a channel file or the binary model.
    Bounds(bounds_cmd::BoundsArgs),
    /// Tabulate the binary closed forms over a p2 grid.
    Sweep(sweep_cmd::SweepArgs),
    /// Run a random-coding simulation.
    Simulate(simulate_cmd::SimulateArgs),
    /// Run the invariant suites.
    Check(check_cmd::CheckArgs),
}

/// Optimizer knobs shared by the commands that maximize.
#[derive(Args, Serialize, Debug, Clone)]
pub struct OptimizerFlags {
    /// Grid points per degree of freedom of each simplex.
    #[arg(long, default_value_t = OptimizerConfig::default().grid_resolution)]
    pub grid_resolution: usize,
    /// Grid points of the binary input-law coordinate.
    #[arg(long, default_value_t = OptimizerConfig::default().alpha_resolution)]
    pub alpha_resolution: usize,
    /// Random restarts of the local ascent.
    #[arg(long, default_value_t = OptimizerConfig::default().restarts)]
    pub restarts: usize,
    /// Above this many grid points the grid is sampled.
    #[arg(long, default_value_t = OptimizerConfig::default().max_grid_points)]
    pub max_grid_points: usize,
}

impl OptimizerFlags {
    pub fn config(&self, seed: u64) -> Result<OptimizerConfig, CliError> {
        if self.grid_resolution < 2 || self.alpha_resolution < 2 {
            return Err(CliError::Invalid("grid resolutions must be at least 2".into()));
        }
        if self.max_grid_points == 0 {
            return Err(CliError::Invalid("max-grid-points must be positive".into()));
        }
        Ok(OptimizerConfig {
            grid_resolution: self.grid_resolution,
            alpha_resolution: self.alpha_resolution,
            restarts: self.restarts,
            max_grid_points: self.max_grid_points,
            seed,
            ..OptimizerConfig::default()
        })
    }
}

/// `--binary P1 P2`, checked against `[0, 0.5)`.
pub fn binary_params(values: &[f64]) -> Result<BinaryWiretapParams, CliError> {
    match values {
        [p1, p2] => BinaryWiretapParams::new(*p1, *p2).map_err(CliError::invalid),
        _ => Err(CliError::Invalid("--binary takes exactly two crossovers".into())),
    }
}

fn configure_threads() {
    let Some(n) = std::env::var("WTFB_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) else {
        return;
    };
    if n > 0 {
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Bounds(a) => bounds_cmd::run(&a),
        Command::Sweep(a) => sweep_cmd::run(&a),
        Command::Simulate(a) => simulate_cmd::run(&a),
        Command::Check(a) => check_cmd::run(&a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
