//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.
//! Tolerances are fixed here and never loosened to make a line pass.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use wtfb::binary::{cb_in, cb_in_new, cb_out};
use wtfb::checks::{
    binary_grid, binary_grid_bounds, degraded_identity_check, expression_a_check, expression_b_check,
    feedback_identity_check, ordering_outcomes, random_channel_bounds, reduction_check, CheckOutcome, Fault,
};
use wtfb::sim::{chi_square_uniformity, run_dmc_feedback_sim, run_wiretap_feedback_sim, RateAllocation, SimConfig};
use wtfb::{make_binary_channel, AuxiliarySystem, BinaryWiretapParams, BoundsConfig, ConditionalPmf, OptimizerConfig, Pmf};

const SEED: u64 = 42;
const CLOSED_FORM_TOL: f64 = 1e-12;
const OPTIMIZER_SLACK: f64 = 2e-3;
const ORACLE_TOL: f64 = 1e-9;
const CHI_SQUARE_LEVEL: f64 = 0.01;
const EXACT_SLACK: f64 = 0.15;

/// Binary entropy, written out here so the oracle shares no code with the library.
fn h(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

fn params(p1: f64, p2: f64) -> BinaryWiretapParams {
    BinaryWiretapParams::new(p1, p2).expect("grid inside the domain")
}

/// `p2 = 0.01, 0.03, ..., 0.49`.
fn odd_grid() -> Vec<f64> {
    (0..25).map(|k| (1 + 2 * k) as f64 / 100.0).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn outcomes(list: &[CheckOutcome]) -> Verdict {
    let lines: Vec<String> = list.iter().map(CheckOutcome::line).collect();
    verdict(list.iter().all(|c| c.passed), lines.join("\n    "))
}

fn closed_form_agreement() -> Verdict {
    let start = Instant::now();
    let grid: Vec<f64> = (0..50).map(|k| k as f64 * 0.01).collect();
    let mut worst: f64 = 0.0;
    for &p1 in &grid {
        for &p2 in &grid {
            let oracle = ((h(p2) - h(p1)).max(0.0) + h(p1)).min(1.0 - h(p1));
            worst = worst.max((cb_in(params(p1, p2)) - oracle).abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst < CLOSED_FORM_TOL && elapsed < Duration::from_secs(1),
        format!("worst {worst:.2e} on 2500 points (tolerance {CLOSED_FORM_TOL:.0e}), {elapsed:.2?} (limit 1 s)"),
    )
}

fn equality_chain_at_p1_02() -> Verdict {
    let start = Instant::now();
    let target = 1.0 - h(0.2);
    let opt = OptimizerConfig { seed: SEED, ..OptimizerConfig::default() };
    let mut worst: f64 = 0.0;
    for p2 in odd_grid() {
        let p = params(0.2, p2);
        for v in [cb_in_new(p, &opt).value, cb_in(p), cb_out(p).value] {
            worst = worst.max((v - target).abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= OPTIMIZER_SLACK && elapsed < Duration::from_secs(300),
        format!("max |bound - (1 - h(0.2))| = {worst:.2e} over 25 p2 values (tolerance {OPTIMIZER_SLACK:.0e}), {elapsed:.2?}"),
    )
}

fn tightness_at_p1_01() -> Verdict {
    let start = Instant::now();
    let opt = OptimizerConfig { seed: SEED, ..OptimizerConfig::default() };
    let mut worst = (0.0f64, 0.0);
    let mut off = Vec::new();
    for p2 in odd_grid() {
        let p = params(0.1, p2);
        let gap = cb_in_new(p, &opt).value - cb_out(p).value;
        if gap.abs() > OPTIMIZER_SLACK {
            off.push(format!("{p2}:{gap:+.4}"));
        }
        if gap.abs() > worst.0 {
            worst = (gap.abs(), p2);
        }
    }
    let elapsed = start.elapsed();
    verdict(
        off.is_empty() && elapsed < Duration::from_secs(600),
        format!(
            "max |cb_in_new - cb_out| = {:.4} at p2 = {} (tolerance {OPTIMIZER_SLACK:.0e}); outside at p2:gap [{}], {elapsed:.2?}",
            worst.0,
            worst.1,
            off.join(" ")
        ),
    )
}

fn dominance_at_small_p2() -> Verdict {
    let opt = OptimizerConfig { seed: SEED, ..OptimizerConfig::default() };
    let margins: Vec<(f64, f64)> = [0.01, 0.02, 0.03]
        .into_iter()
        .map(|p2| {
            let p = params(0.05, p2);
            (p2, cb_in_new(p, &opt).value - cb_in(p))
        })
        .collect();
    let text: Vec<String> = margins.iter().map(|(p2, m)| format!("p2 = {p2}: {m:.4}")).collect();
    verdict(margins.iter().all(|&(_, m)| m > 0.0), format!("cb_in_new - cb_in margins {}", text.join(", ")))
}

fn expression_oracles() -> Verdict {
    outcomes(&[expression_a_check(SEED, 1000), expression_b_check(SEED, 1000, Fault::None)])
}

fn identity_suite() -> Verdict {
    let cfg = BoundsConfig::default();
    let list = vec![
        degraded_identity_check(SEED, 100).expect("degraded identity"),
        feedback_identity_check(SEED, 100).expect("feedback identity"),
        reduction_check(SEED, 20, &cfg).expect("reduction"),
    ];
    let v = outcomes(&list);
    let tol_ok = list[0].tolerance <= ORACLE_TOL && list[1].tolerance <= ORACLE_TOL && list[2].tolerance <= 1e-6;
    verdict(v.passed && tol_ok, v.detail)
}

fn bound_ordering() -> Verdict {
    let cfg = BoundsConfig::default();
    let mut list = ordering_outcomes("random channels", &random_channel_bounds(SEED, 20, &cfg).expect("random bounds"));
    list.extend(ordering_outcomes("binary grid", &binary_grid_bounds(&binary_grid(), &cfg).expect("grid bounds")));
    outcomes(&list)
}

fn simulation_trends() -> Verdict {
    let start = Instant::now();
    let seeds: Vec<u64> = (1..=10).collect();

    // point-to-point: BSC(0.1) at 70% of capacity, uniform input, no quantizer
    let bsc = ConditionalPmf::bsc(0.1).expect("bsc");
    let px = Pmf::uniform(2).expect("uniform");
    let constant_v = ConditionalPmf::constant(vec![2, 2], &Pmf::point_mass(1, 0).expect("point mass")).expect("q");
    let dmc_rates = RateAllocation { r1: 0.7 * (1.0 - h(0.1)), ..Default::default() };
    let dmc: Vec<f64> = [64, 256, 1024]
        .into_iter()
        .map(|n| {
            median(
                seeds
                    .iter()
                    .map(|&seed| {
                        let cfg = SimConfig {
                            n: 4,
                            block_len: n,
                            rates: dmc_rates,
                            epsilon: 0.03,
                            seed,
                            trials: 20,
                            explicit_max_bits: 14,
                        };
                        run_dmc_feedback_sim(&bsc, &px, &constant_v, &cfg).expect("dmc run").decode_error_rate
                    })
                    .collect(),
            )
        })
        .collect();

    // secrecy scheme on the binary model at 70% of the region corner
    let ch = make_binary_channel(params(0.1, 0.3));
    let aux = AuxiliarySystem::from_input(&px, 2).expect("aux");
    let rates = RateAllocation::corner(&aux.info(&ch).expect("info"), 0.7);
    let mut p_values = Vec::new();
    let wiretap: Vec<f64> = [32, 64, 128]
        .into_iter()
        .map(|n| {
            let mut pooled: Vec<u64> = Vec::new();
            let errors = seeds
                .iter()
                .map(|&seed| {
                    let cfg = SimConfig { n: 4, block_len: n, rates, epsilon: 0.05, seed, trials: 20, explicit_max_bits: 14 };
                    let rep = run_wiretap_feedback_sim(&ch, &aux, &cfg).expect("wiretap run");
                    pooled.resize(rep.key_histogram.len(), 0);
                    pooled.iter_mut().zip(&rep.key_histogram).for_each(|(a, b)| *a += b);
                    rep.decode_error_rate
                })
                .collect();
            p_values.push(chi_square_uniformity(&pooled).1);
            median(errors)
        })
        .collect();

    let elapsed = start.elapsed();
    let uniform = p_values.iter().all(|&p| p >= CHI_SQUARE_LEVEL);
    verdict(
        strictly_decreasing(&dmc) && strictly_decreasing(&wiretap) && uniform && elapsed < Duration::from_secs(900),
        format!(
            "dmc medians N=64/256/1024 {dmc:.3?}; wiretap medians N=32/64/128 {wiretap:.3?}; \
             key chi-square p-values {p_values:.3?} (level {CHI_SQUARE_LEVEL}); {elapsed:.2?}"
        ),
    )
}

fn exact_small_equivocation() -> Verdict {
    let ch = make_binary_channel(params(0.1, 0.3));
    let aux = AuxiliarySystem::from_input(&Pmf::uniform(2).expect("uniform"), 2).expect("aux");
    let rates = RateAllocation::corner(&aux.info(&ch).expect("info"), 1.0);
    let cfg = SimConfig { n: 3, block_len: 6, rates, epsilon: 0.2, seed: SEED, trials: 20, explicit_max_bits: 14 };
    let rep = run_wiretap_feedback_sim(&ch, &aux, &cfg).expect("wiretap run");
    let Some(exact) = rep.exact_small else {
        return verdict(false, "no exact equivocation attached".into());
    };
    let floor = exact.configured_secrecy_rate - EXACT_SLACK;
    verdict(
        exact.equivocation_rate >= floor,
        format!(
            "H(W|Y2)/3N = {:.4} bits per symbol vs configured {:.4} - {EXACT_SLACK} = {floor:.4} ({} message bits)",
            exact.equivocation_rate, exact.configured_secrecy_rate, exact.message_bits
        ),
    )
}

/// Runs `args` and returns stdout followed by every listed artifact and its sidecar.
fn capture(args: &[&str], artifacts: &[&Path], threads: &str) -> Result<Vec<u8>, String> {
    for a in artifacts {
        let _ = std::fs::remove_file(a);
    }
    let out = Command::new(env!("CARGO_BIN_EXE_wtfb"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env("WTFB_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let mut bytes = out.stdout;
    for a in artifacts {
        bytes.extend(std::fs::read(a).map_err(|e| format!("{}: {e}", a.display()))?);
        let mut sidecar = a.as_os_str().to_owned();
        sidecar.push(".manifest.json");
        bytes.extend(std::fs::read(&sidecar).map_err(|e| format!("{sidecar:?}: {e}"))?);
    }
    Ok(bytes)
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("tempdir");
    let p = |name: &str| dir.path().join(name);
    let (bounds_csv, sweep_csv, sweep_svg, report, trend) =
        (p("bounds.csv"), p("sweep.csv"), p("sweep.svg"), p("report.json"), p("trend.csv"));
    let config = p("sim.json");
    std::fs::write(
        &config,
        r#"{"n": 4, "N": 32, "rates": {"r1": 0.2, "r2": 0.05, "r_prime": 0, "r_star": 0, "r_tilde": 0},
            "epsilon": 0.05, "seed": 5, "trials": 20}"#,
    )
    .expect("config");
    let s = |path: &Path| path.to_str().expect("utf-8 path").to_owned();
    // (name, argv, artifacts)
    type Run<'a> = (&'a str, Vec<String>, Vec<&'a Path>);
    let runs: Vec<Run> = vec![
        (
            "bounds",
            ["bounds", "--binary", "0.1", "0.3", "--bound", "rstar", "--csv"].map(String::from).into_iter().chain([s(&bounds_csv)]).collect(),
            vec![&bounds_csv],
        ),
        (
            "sweep",
            ["sweep", "--p1", "0.05", "--p2-grid", "0.01:0.2:0.03", "--out"]
                .map(String::from)
                .into_iter()
                .chain([s(&sweep_csv), "--plot".into(), s(&sweep_svg)])
                .collect(),
            vec![&sweep_csv, &sweep_svg],
        ),
        (
            "simulate",
            ["simulate", "--mode", "wiretap", "--binary", "0.1", "0.3", "--n-grid", "16,32", "--config"]
                .map(String::from)
                .into_iter()
                .chain([s(&config), "--out".into(), s(&report), "--trend".into(), s(&trend)])
                .collect(),
            vec![&report, &trend],
        ),
        ("check", ["check", "--suite", "all", "--cases", "50", "--channels", "3"].map(String::from).to_vec(), vec![]),
    ];
    let mut details = Vec::new();
    let mut all = true;
    for (name, args, artifacts) in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = capture(&args, artifacts, "1");
        let second = capture(&args, artifacts, "4");
        let same = match (first, second) {
            (Ok(a), Ok(b)) => a == b,
            // `check --suite all` exits 1 on the known ordering failure; compare stdout anyway
            (Err(_), Err(_)) if *name == "check" => {
                let run = |t: &str| {
                    Command::new(env!("CARGO_BIN_EXE_wtfb"))
                        .args(&args)
                        .env("WTFB_THREADS", t)
                        .output()
                        .map(|o| (o.stdout, o.status.code()))
                        .ok()
                };
                let (a, b) = (run("1"), run("4"));
                a.is_some() && a == b
            }
            (a, b) => {
                details.push(format!("{name}: {:?} / {:?}", a.err(), b.err()));
                false
            }
        };
        all &= same;
        details.push(format!("{name} {}", if same { "identical" } else { "DIFFERS" }));
    }
    verdict(all, format!("1 vs 4 threads: {}", details.join(", ")))
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        ("closed-form cb_in agreement", closed_form_agreement),
        ("equality chain at p1 = 0.2", equality_chain_at_p1_02),
        ("cb_in_new = cb_out at p1 = 0.1", tightness_at_p1_01),
        ("dominance at small p2", dominance_at_small_p2),
        ("expression oracles", expression_oracles),
        ("identity suite", identity_suite),
        ("bound ordering", bound_ordering),
        ("simulation trends", simulation_trends),
        ("exact small-block equivocation", exact_small_equivocation),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        println!("criterion {:>2} {}: {}\n    {}", k + 1, if v.passed { "PASS" } else { "FAIL" }, name, v.detail);
        if !v.passed {
            failed.push(k + 1);
        }
    }
    println!("{} of {} criteria passed; failing: {failed:?}", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
