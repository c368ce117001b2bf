//! Randomized invariant suites: closed forms against brute-force joints,
//! information identities, bound ordering and the constant-`V` reduction.
//! Every suite is a pure function of its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::binary::{self, BinaryAuxParams};
use crate::bounds::{
    degraded_identity_residual, dmc_feedback_rate_identity, ordered_general_bounds, r_s_ahlswede_cai, r_star_s,
    AuxiliarySystem, BoundsConfig, BoundsError,
};
use crate::channel::{make_binary_channel, make_degraded_channel, BinaryWiretapParams, WiretapChannel};
use crate::info::{axis, conditional_entropy, mutual_information, ConditionalPmf, Pmf};
use crate::sim::region_from_info;

pub const IDENTITY_TOL: f64 = 1e-9;
pub const ORDERING_TOL: f64 = 1e-4;
pub const REDUCTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    /// Largest residual or ordering violation seen; 0 when none.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &str, residuals: impl IntoIterator<Item = f64>, tolerance: f64) -> Self {
        let mut cases = 0;
        let mut worst: f64 = 0.0;
        for r in residuals {
            cases += 1;
            // a NaN residual sticks and fails the check
            worst = if r.is_nan() || worst.is_nan() { f64::NAN } else { worst.max(r) };
        }
        Self { name: name.into(), cases, worst, tolerance, passed: worst <= tolerance }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: worst {:.3e} over {} cases (tolerance {:.0e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.cases,
            self.tolerance
        )
    }
}

/// Deliberate errors for exercising the harness itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Shifts every `expression_B` value by `1e-3`.
    ExpressionB,
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn random_pmf(rng: &mut impl Rng, n: usize) -> Pmf {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = w.iter().sum();
    Pmf::new(w.iter().map(|v| v / s).collect()).expect("positive weights")
}

pub fn random_conditional(rng: &mut impl Rng, inputs: Vec<usize>, out: usize) -> ConditionalPmf {
    let rows: usize = inputs.iter().product();
    let table = (0..rows).flat_map(|_| random_pmf(rng, out).probs().to_vec()).collect();
    ConditionalPmf::new(inputs, out, table).expect("rows are normalized")
}

pub fn random_channel(rng: &mut impl Rng, nx: usize, ny1: usize, ny2: usize) -> WiretapChannel {
    WiretapChannel::new(nx, ny1, ny2, random_conditional(rng, vec![nx], ny1 * ny2), None).expect("valid shape")
}

pub fn random_degraded_channel(rng: &mut impl Rng, nx: usize, ny1: usize, ny2: usize) -> WiretapChannel {
    let main = random_conditional(rng, vec![nx], ny1);
    let degrader = random_conditional(rng, vec![ny1], ny2);
    make_degraded_channel(&main, &degrader).expect("matching shapes")
}

/// A full-cardinality auxiliary system for `ch`.
pub fn random_aux(rng: &mut impl Rng, ch: &WiretapChannel) -> AuxiliarySystem {
    let (nu, nv) = (ch.x_size() + 1, ch.x_size() + 2);
    AuxiliarySystem::new(
        ch.x_size(),
        ch.y1_size(),
        random_pmf(rng, nu),
        random_conditional(rng, vec![nu], ch.x_size()),
        random_conditional(rng, vec![nu, ch.y1_size()], nv),
    )
    .expect("sizes at the caps")
}

/// Binary parameters with about a fifth of the coordinates pinned to 0 or 1.
pub fn random_binary_params(rng: &mut impl Rng) -> (BinaryWiretapParams, BinaryAuxParams) {
    let coord = |rng: &mut ChaCha8Rng| -> f64 {
        match rng.gen_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..1.0),
        }
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let p = BinaryWiretapParams::new(r.gen_range(0.0..0.5), r.gen_range(0.0..0.5)).expect("inside the domain");
    let alpha = coord(&mut r);
    let gamma = [coord(&mut r), coord(&mut r), coord(&mut r), coord(&mut r)];
    (p, BinaryAuxParams { alpha, gamma })
}

/// `expression_A` against `I(X; Y1, V)` of the assembled joint.
pub fn expression_a_check(seed: u64, cases: usize) -> CheckOutcome {
    let mut r = rng(seed, 1);
    let residuals: Vec<f64> = (0..cases)
        .map(|_| {
            let (p, params) = random_binary_params(&mut r);
            let j = params.aux_system().joint(&make_binary_channel(p)).expect("valid joint");
            let brute = mutual_information(&j, &[axis::X], &[axis::Y1, axis::V]).expect("valid axes");
            (binary::expression_a(p.p1, &params) - brute).abs()
        })
        .collect();
    CheckOutcome::new("expression_A = I(X;Y1,V)", residuals, IDENTITY_TOL)
}

/// `expression_B` against `H(Y1 | Y2)` of the assembled joint.
pub fn expression_b_check(seed: u64, cases: usize, fault: Fault) -> CheckOutcome {
    let mut r = rng(seed, 2);
    let shift = if fault == Fault::ExpressionB { 1e-3 } else { 0.0 };
    let residuals: Vec<f64> = (0..cases)
        .map(|_| {
            let (p, params) = random_binary_params(&mut r);
            let j = params.aux_system().joint(&make_binary_channel(p)).expect("valid joint");
            let brute = conditional_entropy(&j, &[axis::Y1], &[axis::Y2]).expect("valid axes");
            (binary::expression_b(p, params.alpha) + shift - brute).abs()
        })
        .collect();
    CheckOutcome::new("expression_B = H(Y1|Y2)", residuals, IDENTITY_TOL)
}

/// Degraded identity on random composed channels with alphabets up to 4.
pub fn degraded_identity_check(seed: u64, cases: usize) -> Result<CheckOutcome, BoundsError> {
    let mut r = rng(seed, 3);
    let mut residuals = Vec::with_capacity(cases);
    for _ in 0..cases {
        let (nx, ny1, ny2) = (r.gen_range(2..=4), r.gen_range(2..=4), r.gen_range(2..=4));
        let ch = random_degraded_channel(&mut r, nx, ny1, ny2);
        let px = random_pmf(&mut r, nx);
        residuals.push(degraded_identity_residual(&ch, &px)?.abs());
    }
    Ok(CheckOutcome::new("degraded identity", residuals, IDENTITY_TOL))
}

/// `I(Y,V;X) - I(V;X|Y) = I(X;Y)` on random channels and quantizers.
pub fn feedback_identity_check(seed: u64, cases: usize) -> Result<CheckOutcome, BoundsError> {
    let mut r = rng(seed, 4);
    let mut residuals = Vec::with_capacity(cases);
    for _ in 0..cases {
        let (nx, ny) = (r.gen_range(2..=4), r.gen_range(2..=4));
        let main = random_conditional(&mut r, vec![nx], ny);
        let q = random_conditional(&mut r, vec![nx, ny], nx + 2);
        let px = random_pmf(&mut r, nx);
        let (lhs, rhs) = dmc_feedback_rate_identity(&main, &q, &px)?;
        residuals.push((lhs - rhs).abs());
    }
    Ok(CheckOutcome::new("point-to-point feedback identity", residuals, IDENTITY_TOL))
}

/// Eliminating the quantizer rates leaves the `rstar` objective.
pub fn elimination_check(seed: u64, cases: usize) -> Result<CheckOutcome, BoundsError> {
    let mut r = rng(seed, 5);
    let mut residuals = Vec::with_capacity(cases);
    for _ in 0..cases {
        let ch = random_channel(&mut r, 2, 2, 2);
        let aux = random_aux(&mut r, &ch);
        let report = region_from_info(aux.info(&ch)?, &Default::default());
        let direct = crate::bounds::objective_value(crate::bounds::BoundKind::RStar, &ch, &aux)?;
        residuals.push(report.elimination_residual.max((report.eliminated_bound - direct).abs()));
    }
    Ok(CheckOutcome::new("rate elimination", residuals, IDENTITY_TOL))
}

pub fn identities_suite(seed: u64, cases: usize, fault: Fault) -> Result<Vec<CheckOutcome>, BoundsError> {
    Ok(vec![
        expression_a_check(seed, cases),
        expression_b_check(seed, cases, fault),
        degraded_identity_check(seed, cases)?,
        feedback_identity_check(seed, cases)?,
        elimination_check(seed, cases)?,
    ])
}

/// Values of `cs, rs, rstar, cfout` on `channels` random binary-alphabet channels.
pub fn random_channel_bounds(seed: u64, channels: usize, cfg: &BoundsConfig) -> Result<Vec<[f64; 4]>, BoundsError> {
    let mut r = rng(seed, 6);
    let chs: Vec<WiretapChannel> = (0..channels).map(|_| random_channel(&mut r, 2, 2, 2)).collect();
    chs.iter()
        .map(|ch| Ok(ordered_general_bounds(ch, cfg)?.map(|b| b.value)))
        .collect()
}

/// One outcome per adjacent pair of `cs <= rs <= rstar <= cfout`.
pub fn ordering_outcomes(label: &str, values: &[[f64; 4]]) -> Vec<CheckOutcome> {
    const NAMES: [&str; 4] = ["cs", "rs", "rstar", "cfout"];
    (0..3)
        .map(|k| {
            CheckOutcome::new(
                &format!("{label}: {} <= {}", NAMES[k], NAMES[k + 1]),
                values.iter().map(|v| (v[k] - v[k + 1]).max(0.0)),
                ORDERING_TOL,
            )
        })
        .collect()
}

/// The binary evaluators `cb_s, cb_in, cb_in_new, cb_out` on each `(p1, p2)`.
pub fn binary_grid_bounds(points: &[(f64, f64)], cfg: &BoundsConfig) -> Result<Vec<[f64; 4]>, BoundsError> {
    points
        .par_iter()
        .map(|&(p1, p2)| {
            let p = BinaryWiretapParams::new(p1, p2)?;
            Ok([binary::cb_s(p), binary::cb_in(p), binary::cb_in_new(p, &cfg.optimizer).value, binary::cb_out(p).value])
        })
        .collect()
}

/// `p1` in `{0.05, 0.1, 0.2}` against `p2 = 0.01, 0.03, ..., 0.49`.
pub fn binary_grid() -> Vec<(f64, f64)> {
    let p2: Vec<f64> = (0..25).map(|k| (1 + 2 * k) as f64 / 100.0).collect();
    [0.05, 0.1, 0.2].iter().flat_map(|&p1| p2.iter().map(move |&p2| (p1, p2))).collect()
}

pub fn ordering_suite(seed: u64, channels: usize, cfg: &BoundsConfig) -> Result<Vec<CheckOutcome>, BoundsError> {
    let mut out = ordering_outcomes("random channels", &random_channel_bounds(seed, channels, cfg)?);
    out.extend(ordering_outcomes("binary grid", &binary_grid_bounds(&binary_grid(), cfg)?));
    Ok(out)
}

/// `|rstar - rs|` with `|V| = 1` on random binary-alphabet channels.
pub fn reduction_check(seed: u64, channels: usize, cfg: &BoundsConfig) -> Result<CheckOutcome, BoundsError> {
    let mut r = rng(seed, 7);
    let chs: Vec<WiretapChannel> = (0..channels).map(|_| random_channel(&mut r, 2, 2, 2)).collect();
    let constant_v = BoundsConfig { v_size: Some(1), ..cfg.clone() };
    let residuals = chs
        .iter()
        .map(|ch| Ok((r_star_s(ch, &constant_v)?.value - r_s_ahlswede_cai(ch, cfg)?.value).abs()))
        .collect::<Result<Vec<f64>, BoundsError>>()?;
    Ok(CheckOutcome::new("constant-V reduction", residuals, REDUCTION_TOL))
}
