use std::fmt::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use wtfb::bounds::{
    c_d_wyner, c_df_degraded, c_f_out, c_f_star_out_nondegraded, cs_general, ordered_general_bounds,
    r_double_star_nondegraded, r_non_ahlswede_cai_nondegraded, r_s_ahlswede_cai, r_star_s, Argmax,
};
use wtfb::channel::decimal_literal;
use wtfb::{load_channel, make_binary_channel, BoundResult, BoundsConfig, ConditionalPmf, StructureTag, WiretapChannel};

use crate::error::CliError;
use crate::manifest::{emit, RunManifest};
use crate::{binary_params, OptimizerFlags};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundChoice {
    Cs,
    Rs,
    Rstar,
    Cfout,
    Rdstar,
    Cfstarout,
    Rnon,
    Cd,
    Cdf,
    /// The four general bounds plus those the channel structure admits.
    All,
}

#[derive(Args, Serialize, Debug)]
pub struct BoundsArgs {
    /// Channel JSON file.
    #[arg(long, required_unless_present = "binary", conflicts_with = "binary")]
    pub channel: Option<PathBuf>,
    /// Binary model crossovers, each in [0, 0.5).
    #[arg(long, num_args = 2, value_names = ["P1", "P2"], allow_negative_numbers = true)]
    pub binary: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "all")]
    pub bound: BoundChoice,
    /// Also write the results as CSV.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub optimizer: OptimizerFlags,
}

fn load(args: &BoundsArgs) -> Result<WiretapChannel, CliError> {
    match (&args.channel, &args.binary) {
        (Some(path), _) => Ok(load_channel(path)?),
        (None, Some(v)) => Ok(make_binary_channel(binary_params(v)?)),
        (None, None) => Err(CliError::Invalid("need --channel or --binary".into())),
    }
}

pub fn evaluate(ch: &WiretapChannel, choice: BoundChoice, cfg: &BoundsConfig) -> Result<Vec<BoundResult>, CliError> {
    Ok(match choice {
        BoundChoice::Cs => vec![cs_general(ch, cfg)?],
        BoundChoice::Rs => vec![r_s_ahlswede_cai(ch, cfg)?],
        BoundChoice::Rstar => vec![r_star_s(ch, cfg)?],
        BoundChoice::Cfout => vec![c_f_out(ch, cfg)?],
        BoundChoice::Rdstar => vec![r_double_star_nondegraded(ch, cfg)?],
        BoundChoice::Cfstarout => vec![c_f_star_out_nondegraded(ch, cfg)?],
        BoundChoice::Rnon => vec![r_non_ahlswede_cai_nondegraded(ch, cfg)?],
        BoundChoice::Cd => vec![c_d_wyner(ch, cfg)?],
        BoundChoice::Cdf => vec![c_df_degraded(ch, cfg)?],
        BoundChoice::All => {
            let mut out = ordered_general_bounds(ch, cfg)?.to_vec();
            match ch.structure() {
                StructureTag::NonDegraded => {
                    out.push(r_non_ahlswede_cai_nondegraded(ch, cfg)?);
                    out.push(r_double_star_nondegraded(ch, cfg)?);
                    out.push(c_f_star_out_nondegraded(ch, cfg)?);
                }
                StructureTag::PhysicallyDegraded => {
                    out.push(c_d_wyner(ch, cfg)?);
                    out.push(c_df_degraded(ch, cfg)?);
                }
                StructureTag::General => {}
            }
            out
        }
    })
}

fn list(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| decimal_literal(v)).collect();
    format!("[{}]", items.join(" "))
}

fn rows(c: &ConditionalPmf) -> String {
    let items: Vec<String> = (0..c.num_rows()).map(|i| list(c.row(i))).collect();
    format!("[{}]", items.join(" "))
}

/// Single-field text with no commas, usable in CSV and the table alike.
pub fn format_argmax(a: &Argmax) -> String {
    match a {
        Argmax::Aux(s) => format!(
            "pu={};px_given_u={};pv_given_uy1={}",
            list(s.pu.probs()),
            rows(&s.px_given_u),
            rows(&s.pv_given_uy1)
        ),
        Argmax::Binary(b) => format!("alpha={};gamma={}", decimal_literal(b.alpha), list(&b.gamma)),
        Argmax::Alpha(a) => format!("alpha={}", decimal_literal(*a)),
        Argmax::None => "-".into(),
    }
}

pub fn run(args: &BoundsArgs) -> Result<(), CliError> {
    let ch = load(args)?;
    let cfg = BoundsConfig { optimizer: args.optimizer.config(args.seed)?, ..BoundsConfig::default() };
    let results = evaluate(&ch, args.bound, &cfg)?;
    let manifest = RunManifest::new("bounds", args, args.seed);

    let mut table = manifest.comment_line();
    let _ = writeln!(table, "# structure: {:?}", ch.structure());
    let _ = writeln!(table, "{:<12} {:<24} argmax", "bound", "value");
    let mut csv = manifest.comment_line();
    csv.push_str("bound,value,argmax\n");
    for r in &results {
        let name = r.bound_kind.name();
        let value = decimal_literal(r.value);
        let arg = format_argmax(&r.argmax);
        let _ = writeln!(table, "{name:<12} {value:<24} {arg}");
        let _ = writeln!(csv, "{name},{value},{arg}");
    }
    if let Some(path) = &args.csv {
        emit(&manifest, &[(path, &csv)])?;
    }
    print!("{table}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct Wrap {
        #[command(flatten)]
        args: BoundsArgs,
    }

    fn args(extra: &[&str]) -> BoundsArgs {
        Wrap::parse_from(std::iter::once("bounds").chain(extra.iter().copied())).args
    }

    #[test]
    fn malformed_channel_is_a_validation_error_with_no_output() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.json");
        std::fs::write(&bad, r#"{"x_size": 2, "y1_size": 2, "y2_size": 2, "law": [[[0.5, 0.6], [0, 0]]]}"#).unwrap();
        let csv = dir.path().join("out.csv");
        let a = args(&["--channel", bad.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
        let err = run(&a).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(!csv.exists());
    }

    #[test]
    fn binary_out_of_domain_names_the_parameter() {
        let err = run(&args(&["--binary", "0.1", "0.7"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("p2"), "{err}");
    }

    #[test]
    fn csv_carries_manifest_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("b.csv");
        run(&args(&["--binary", "0.2", "0.3", "--bound", "rs", "--csv", csv.to_str().unwrap()])).unwrap();
        let text = std::fs::read_to_string(&csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# manifest: {\"command\":\"bounds\""));
        assert_eq!(lines[1], "bound,value,argmax");
        let value: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        let h = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((value - (1.0 - h(0.2))).abs() < 1e-4, "{value}");
        assert!(crate::manifest::sidecar_path(&csv).exists());
    }
}
