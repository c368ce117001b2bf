use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use wtfb::binary::{sweep, sweep_csv};
use wtfb::BinaryWiretapParams;

use crate::error::CliError;
use crate::grid::parse_grid;
use crate::manifest::{emit, RunManifest};
use crate::plot::sweep_svg;
use crate::OptimizerFlags;

#[derive(Args, Serialize, Debug)]
pub struct SweepArgs {
    /// Main-channel crossover in [0, 0.5).
    #[arg(long, allow_negative_numbers = true)]
    pub p1: f64,
    /// `start:stop:step`: points start + k*step for k = 0, 1, ... while below
    /// stop + step/2 (so stop is included when on the lattice); a single
    /// number is a one-point grid. Every point must lie in [0, 0.5).
    #[arg(long, default_value = "0.01:0.49:0.02", allow_hyphen_values = true)]
    pub p2_grid: String,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// SVG plot destination.
    #[arg(long)]
    #[serde(skip)]
    pub plot: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub optimizer: OptimizerFlags,
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.p2_grid)?;
    // validate the whole grid before any work
    for &p2 in &grid {
        BinaryWiretapParams::new(args.p1, p2).map_err(CliError::invalid)?;
    }
    let opt = args.optimizer.config(args.seed)?;
    let rows = sweep(args.p1, &grid, &opt)?;
    let manifest = RunManifest::new("sweep", args, args.seed);

    let csv = format!("{}{}", manifest.comment_line(), sweep_csv(args.p1, &rows));
    let svg = args.plot.as_ref().map(|_| sweep_svg(args.p1, &rows, &format!("manifest: {}", manifest.json())));
    let mut artifacts = Vec::new();
    if let Some(path) = &args.out {
        artifacts.push((path.as_path(), csv.as_str()));
    }
    if let (Some(path), Some(svg)) = (&args.plot, &svg) {
        artifacts.push((path.as_path(), svg.as_str()));
    }
    emit(&manifest, &artifacts)?;
    if args.out.is_none() {
        print!("{csv}");
    }
    Ok(())
}
