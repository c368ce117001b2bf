use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use wtfb::channel::decimal_literal;
use wtfb::sim::{run_dmc_feedback_sim, run_wiretap_feedback_sim, run_wz_sim, SimConfig, SimReport};
use wtfb::{
    load_channel, make_binary_channel, AuxiliarySystem, ConditionalPmf, JointPmf, Pmf, WiretapChannel,
};

use crate::binary_params;
use crate::error::CliError;
use crate::grid::parse_list;
use crate::manifest::{emit, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Source coding with side information: source `x` uniform, side
    /// information through the main channel, quantizer BSC(--wz-crossover).
    Wynerziv,
    /// Point-to-point feedback scheme on the main channel.
    Dmc,
    /// The secrecy scheme on the full channel.
    Wiretap,
}

#[derive(Args, Serialize, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// SimConfig JSON: n, N, rates {r1, r2, r_prime, r_star, r_tilde},
    /// epsilon, seed, trials and optionally explicit_max_bits.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, required_unless_present = "binary", conflicts_with = "binary")]
    pub channel: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["P1", "P2"], allow_negative_numbers = true)]
    pub binary: Option<Vec<f64>>,
    /// Auxiliary system JSON {pu, px_given_u, pv_given_uy1} with rows of
    /// `pv_given_uy1` ordered by (u, y1), y1 fastest. Default: uniform `U = X`,
    /// constant `V`.
    #[arg(long)]
    pub aux: Option<PathBuf>,
    /// Comma-separated block lengths run in turn instead of the config's `N`.
    #[arg(long)]
    pub n_grid: Option<String>,
    /// Quantizer crossover in wynerziv mode.
    #[arg(long, default_value_t = 0.1)]
    pub wz_crossover: f64,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report JSON destination; stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Error-versus-N CSV destination.
    #[arg(long)]
    #[serde(skip)]
    pub trend: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AuxFile {
    pu: Vec<f64>,
    px_given_u: Vec<Vec<f64>>,
    pv_given_uy1: Vec<Vec<f64>>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_aux(path: &Path, ch: &WiretapChannel) -> Result<AuxiliarySystem, CliError> {
    let f: AuxFile = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let v_size = f.pv_given_uy1.first().map_or(0, Vec::len);
    Ok(AuxiliarySystem::new(
        ch.x_size(),
        ch.y1_size(),
        Pmf::new(f.pu.clone())?,
        ConditionalPmf::from_rows(&f.px_given_u)?,
        ConditionalPmf::new(vec![f.pu.len(), ch.y1_size()], v_size, f.pv_given_uy1.concat())?,
    )?)
}

#[derive(Serialize)]
struct Output<'a> {
    manifest: &'a RunManifest,
    reports: &'a [SimReport],
}

fn simulate(args: &SimulateArgs, ch: &WiretapChannel, aux: &AuxiliarySystem, cfg: &SimConfig) -> Result<SimReport, CliError> {
    Ok(match args.mode {
        Mode::Wiretap => run_wiretap_feedback_sim(ch, aux, cfg)?,
        Mode::Dmc => {
            if aux.px_given_u != ConditionalPmf::identity(ch.x_size())? {
                return Err(CliError::Invalid("dmc mode needs U = X (px_given_u the identity)".into()));
            }
            run_dmc_feedback_sim(&ch.main_channel(), &aux.pu, &aux.pv_given_uy1, cfg)?
        }
        Mode::Wynerziv => {
            if ch.x_size() != 2 {
                return Err(CliError::Invalid("wynerziv mode needs a binary source".into()));
            }
            let source = JointPmf::from_channel(&Pmf::uniform(2)?, &ch.main_channel())?;
            run_wz_sim(&source, &ConditionalPmf::bsc(args.wz_crossover)?, cfg)?
        }
    })
}

pub fn trend_csv(manifest: &RunManifest, reports: &[SimReport]) -> String {
    let mut out = manifest.comment_line();
    out.push_str("N,decode_error_rate,encoder_failure_rate,measured_equivocation_rate,key_chi_square_p_value\n");
    for r in reports {
        let eq = r.measured_equivocation_rate.map_or(String::new(), decimal_literal);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.config.block_len,
            decimal_literal(r.decode_error_rate),
            decimal_literal(r.encoder_failure_rate),
            eq,
            decimal_literal(r.key_chi_square_p_value)
        );
    }
    out
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let mut cfg: SimConfig = serde_json::from_str(&read(&args.config)?)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let ch = match (&args.channel, &args.binary) {
        (Some(path), _) => load_channel(path)?,
        (None, Some(v)) => make_binary_channel(binary_params(v)?),
        (None, None) => return Err(CliError::Invalid("need --channel or --binary".into())),
    };
    let aux = match &args.aux {
        Some(path) => load_aux(path, &ch)?,
        None => AuxiliarySystem::from_input(&Pmf::uniform(ch.x_size())?, ch.y1_size())?,
    };
    let lengths = match &args.n_grid {
        Some(spec) => parse_list(spec)?,
        None => vec![cfg.block_len],
    };
    let reports = lengths
        .iter()
        .map(|&n| simulate(args, &ch, &aux, &SimConfig { block_len: n, ..cfg.clone() }))
        .collect::<Result<Vec<_>, _>>()?;

    let manifest = RunManifest::new("simulate", args, cfg.seed);
    let mut json = serde_json::to_string_pretty(&Output { manifest: &manifest, reports: &reports })?;
    json.push('\n');
    let trend = trend_csv(&manifest, &reports);
    let mut artifacts = Vec::new();
    if let Some(path) = &args.out {
        artifacts.push((path.as_path(), json.as_str()));
    }
    if let Some(path) = &args.trend {
        artifacts.push((path.as_path(), trend.as_str()));
    }
    emit(&manifest, &artifacts)?;
    if args.out.is_none() {
        print!("{json}");
    }
    Ok(())
}
