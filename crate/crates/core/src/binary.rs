//! Bounds for the binary wiretap channel `Y1 = X xor Z1`, `Y2 = X xor Z2`
//! with independent `Z1 ~ Bern(p1)`, `Z2 ~ Bern(p2)`.
//!
//! Parameterization: `alpha = P(x = 0)` and `gamma_k = P(v = 0 | x, y1)` for
//! `(x, y1)` in the order `(0,0), (0,1), (1,0), (1,1)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{Argmax, AuxiliarySystem, BoundKind, BoundResult};
use crate::channel::{decimal_literal, BinaryWiretapParams};
use crate::info::{h2, star_unchecked as star, ConditionalPmf, Pmf};
use crate::optim::{self, Block, OptimizerConfig, SimplexDomain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryAuxParams {
    pub alpha: f64,
    pub gamma: [f64; 4],
}

impl BinaryAuxParams {
    pub fn new(alpha: f64, gamma: [f64; 4]) -> Option<Self> {
        let ok = std::iter::once(alpha).chain(gamma).all(|v| (0.0..=1.0).contains(&v));
        ok.then_some(Self { alpha, gamma })
    }

    /// The same law after swapping the labels of `X` (and hence of `Y1`).
    pub fn relabeled(&self) -> Self {
        let [g1, g2, g3, g4] = self.gamma;
        Self { alpha: 1.0 - self.alpha, gamma: [g4, g3, g2, g1] }
    }

    /// `U = X` system with `P(v|x,y1)` built from `gamma`.
    pub fn aux_system(&self) -> AuxiliarySystem {
        let rows: Vec<f64> = self.gamma.iter().flat_map(|&g| [g, 1.0 - g]).collect();
        AuxiliarySystem::new(
            2,
            2,
            Pmf::binary(self.alpha).expect("alpha in [0, 1]"),
            ConditionalPmf::identity(2).expect("nonempty"),
            ConditionalPmf::new(vec![2, 2], 2, rows).expect("gamma in [0, 1]"),
        )
        .expect("binary shapes are within the caps")
    }
}

/// `c log2(num / den)` with `0 log(0 / .) = 0`.
fn term(c: f64, num: f64, den: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * (num / den).log2()
    }
}

/// `[h(p2) - h(p1)]+`.
pub fn cb_s(p: BinaryWiretapParams) -> f64 {
    (h2(p.p2) - h2(p.p1)).max(0.0)
}

/// `min{[h(p2) - h(p1)]+ + h(p1), 1 - h(p1)}`, the input-law maximum taken at `alpha = 1/2`.
pub fn cb_in(p: BinaryWiretapParams) -> f64 {
    (cb_s(p) + h2(p.p1)).min(1.0 - h2(p.p1))
}

/// The feedback lower bound without `V` at input law `alpha`.
pub fn cb_in_objective(p: BinaryWiretapParams, alpha: f64) -> f64 {
    let (p1, p2) = (p.p1, p.p2);
    let i1 = h2(star(alpha, p1)) - h2(p1);
    ((i1 - h2(star(alpha, p2)) + h2(p2)).max(0.0) + h2(p1)).min(i1)
}

/// [`cb_in_objective`] maximized over `alpha` on a uniform grid of `points` values.
pub fn cb_in_alpha_max(p: BinaryWiretapParams, points: usize) -> f64 {
    (0..points)
        .map(|k| cb_in_objective(p, k as f64 / (points - 1) as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The eight-term sum `A`, equal to `I(X; Y1, V)`.
pub fn expression_a(p1: f64, params: &BinaryAuxParams) -> f64 {
    let a = params.alpha;
    let b = 1.0 - a;
    let q1 = 1.0 - p1;
    let [g1, g2, g3, g4] = params.gamma;
    let (n1, n2, n3, n4) = (1.0 - g1, 1.0 - g2, 1.0 - g3, 1.0 - g4);
    term(g1 * a * q1, g1 * q1, g1 * a * q1 + g3 * p1 * b)
        + term(n1 * a * q1, n1 * q1, n1 * a * q1 + n3 * p1 * b)
        + term(g2 * p1 * a, g2 * p1, g2 * p1 * a + g4 * q1 * b)
        + term(n2 * p1 * a, n2 * p1, n2 * p1 * a + n4 * q1 * b)
        + term(g3 * p1 * b, g3 * p1, g3 * p1 * b + g1 * q1 * a)
        + term(n3 * p1 * b, n3 * p1, n3 * p1 * b + n1 * q1 * a)
        + term(g4 * q1 * b, g4 * q1, g4 * q1 * b + g2 * p1 * a)
        + term(n4 * q1 * b, n4 * q1, n4 * q1 * b + n2 * p1 * a)
}

/// `min{[A - h(alpha * p2) + h(p2)]+ + h(p1), h(alpha * p1) - h(p1)}`.
pub fn cb_in_new_objective(p: BinaryWiretapParams, params: &BinaryAuxParams) -> f64 {
    let (p1, p2) = (p.p1, p.p2);
    let gain = (expression_a(p1, params) - h2(star(params.alpha, p2)) + h2(p2)).max(0.0);
    (gain + h2(p1)).min(h2(star(params.alpha, p1)) - h2(p1))
}

/// The four-term sum `B`, equal to `H(Y1 | Y2)`; the product of the two
/// crossovers appears where the joint `P(y1, y2)` needs it.
pub fn expression_b(p: BinaryWiretapParams, alpha: f64) -> f64 {
    let (p1, p2) = (p.p1, p.p2);
    let a = alpha;
    let b = 1.0 - a;
    let pq = p1 * p2;
    let j00 = a * (1.0 - p1) * (1.0 - p2) + b * pq;
    let j01 = a * (1.0 - p1) * p2 + b * p1 * (1.0 - p2);
    let j10 = a * p1 * (1.0 - p2) + b * (1.0 - p1) * p2;
    let j11 = a * pq + b * (1.0 - p1) * (1.0 - p2);
    let y2_0 = a * (1.0 - p2) + b * p2;
    let y2_1 = a * p2 + b * (1.0 - p2);
    term(j00, y2_0, j00) + term(j01, y2_1, j01) + term(j10, y2_0, j10) + term(j11, y2_1, j11)
}

/// `min{B, h(alpha * p1) - h(p1)}`.
pub fn cb_out_objective(p: BinaryWiretapParams, alpha: f64) -> f64 {
    expression_b(p, alpha).min(h2(star(alpha, p.p1)) - h2(p.p1))
}

/// Maximizes [`cb_in_new_objective`] over `(alpha, gamma)`.
pub fn cb_in_new(p: BinaryWiretapParams, opt: &OptimizerConfig) -> BoundResult {
    let mut blocks = vec![Block { size: 2, resolution: opt.alpha_resolution }];
    blocks.extend(SimplexDomain::repeated(4, 2, opt.grid_resolution));
    let domain = SimplexDomain::new(blocks);
    let unpack = |x: &[f64]| BinaryAuxParams { alpha: x[0], gamma: [x[2], x[4], x[6], x[8]] };
    // V independent of (x, y1) at alpha = 1/2 recovers cb_in
    let seed = vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5];
    let best = optim::maximize(&domain, |x| cb_in_new_objective(p, &unpack(x)), opt, &[seed]);
    BoundResult {
        bound_kind: BoundKind::CbInNew,
        value: best.value,
        argmax: Argmax::Binary(unpack(&best.point)),
        optimizer_trace: Some(best.trace),
    }
}

/// Points of the `alpha` grid for the one-dimensional outer bound.
pub const CB_OUT_GRID: usize = 2001;

/// Maximizes [`cb_out_objective`] over `alpha`: a uniform grid, then
/// golden-section refinement inside the best grid cell pair.
pub fn cb_out(p: BinaryWiretapParams) -> BoundResult {
    let f = |a: f64| cb_out_objective(p, a);
    let step = 1.0 / (CB_OUT_GRID - 1) as f64;
    let (mut best_a, mut best_v) = (0.0, f64::NEG_INFINITY);
    for k in 0..CB_OUT_GRID {
        let a = k as f64 * step;
        let v = f(a);
        if v > best_v {
            best_a = a;
            best_v = v;
        }
    }
    let (mut lo, mut hi) = ((best_a - step).max(0.0), (best_a + step).min(1.0));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    for (a, v) in [(c, fc), (d, fd)] {
        if v > best_v {
            best_a = a;
            best_v = v;
        }
    }
    BoundResult { bound_kind: BoundKind::CbOut, value: best_v, argmax: Argmax::Alpha(best_a), optimizer_trace: None }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p2: f64,
    pub cb_s: f64,
    pub cb_in: f64,
    pub cb_in_new: f64,
    pub cb_out: f64,
    pub alpha_star: f64,
    pub gamma: [f64; 4],
}

/// One row per `p2`, in grid order.
pub fn sweep(p1: f64, p2_grid: &[f64], opt: &OptimizerConfig) -> Result<Vec<SweepRow>, crate::ChannelError> {
    let params: Vec<BinaryWiretapParams> =
        p2_grid.iter().map(|&p2| BinaryWiretapParams::new(p1, p2)).collect::<Result<_, _>>()?;
    Ok(params
        .par_iter()
        .map(|&p| {
            let new = cb_in_new(p, opt);
            let Argmax::Binary(arg) = new.argmax else { unreachable!("binary argmax") };
            SweepRow {
                p2: p.p2,
                cb_s: cb_s(p),
                cb_in: cb_in(p),
                cb_in_new: new.value,
                cb_out: cb_out(p).value,
                alpha_star: arg.alpha,
                gamma: arg.gamma,
            }
        })
        .collect())
}

pub const SWEEP_HEADER: &str = "p2,cb_s,cb_in,cb_in_new,cb_out,alpha_star,gamma1,gamma2,gamma3,gamma4";

/// CSV with a comment line documenting the `gamma` order, then the header and rows.
pub fn sweep_csv(p1: f64, rows: &[SweepRow]) -> String {
    let mut out = format!(
        "# p1={}; alpha_star=P(x=0) and gamma_k=P(v=0|x,y1) at the cb_in_new argmax, \
         gamma1:(x=0,y1=0) gamma2:(x=0,y1=1) gamma3:(x=1,y1=0) gamma4:(x=1,y1=1)\n{SWEEP_HEADER}\n",
        decimal_literal(p1)
    );
    for r in rows {
        let fields = [r.p2, r.cb_s, r.cb_in, r.cb_in_new, r.cb_out, r.alpha_star]
            .into_iter()
            .chain(r.gamma)
            .map(decimal_literal)
            .collect::<Vec<_>>();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_binary_channel;
    use crate::info::{assemble_joint, axis, conditional_entropy, mutual_information};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn bp(p1: f64, p2: f64) -> BinaryWiretapParams {
        BinaryWiretapParams::new(p1, p2).unwrap()
    }

    fn joint_a(p1: f64, params: &BinaryAuxParams) -> f64 {
        let ch = make_binary_channel(bp(p1, 0.3));
        let j = params.aux_system().joint(&ch).unwrap();
        mutual_information(&j, &[axis::X], &[axis::Y1, axis::V]).unwrap()
    }

    fn joint_b(p: BinaryWiretapParams, alpha: f64) -> f64 {
        let ch = make_binary_channel(p);
        let aux = AuxiliarySystem::from_input(&Pmf::binary(alpha).unwrap(), 2).unwrap();
        let j = assemble_joint(&aux.pu, &aux.px_given_u, ch.law(), &aux.pv_given_uy1).unwrap();
        conditional_entropy(&j, &[axis::Y1], &[axis::Y2]).unwrap()
    }

    #[test]
    fn cb_s_examples() {
        assert_eq!(cb_s(bp(0.1, 0.1)), 0.0);
        assert_eq!(cb_s(bp(0.2, 0.1)), 0.0);
        assert_abs_diff_eq!(cb_s(bp(0.05, 0.2)), 0.7219280948873623 - 0.28639695711595625, epsilon = 1e-14);
    }

    #[test]
    fn cb_in_examples() {
        assert_abs_diff_eq!(cb_in(bp(0.2, 0.37)), 1.0 - h2(0.2), epsilon = 1e-15);
        assert_eq!(cb_in(bp(0.0, 0.0)), 0.0);
        assert_abs_diff_eq!(cb_in(bp(0.05, 0.3)), h2(0.3).min(1.0 - h2(0.05)), epsilon = 1e-15);
    }

    #[test]
    fn cb_in_closed_form_matches_alpha_search() {
        for (p1, p2) in [(0.05, 0.01), (0.05, 0.3), (0.1, 0.2), (0.2, 0.45), (0.3, 0.1)] {
            let p = bp(p1, p2);
            assert_abs_diff_eq!(cb_in(p), cb_in_alpha_max(p, 2001), epsilon = 1e-12);
        }
    }

    #[test]
    fn expression_a_examples() {
        let p1 = 0.1;
        let indep = BinaryAuxParams::new(0.3, [0.4; 4]).unwrap();
        assert_abs_diff_eq!(expression_a(p1, &indep), h2(star(0.3, p1)) - h2(p1), epsilon = 1e-12);
        let v_is_x = BinaryAuxParams::new(0.5, [1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(expression_a(p1, &v_is_x), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(joint_a(p1, &v_is_x), 1.0, epsilon = 1e-12);
        let v_is_y1 = BinaryAuxParams::new(0.5, [1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(expression_a(p1, &v_is_y1), 1.0 - h2(p1), epsilon = 1e-12);
    }

    #[test]
    fn expression_b_examples() {
        // Y1 = X: H(X | Y2)
        assert_abs_diff_eq!(expression_b(bp(0.0, 0.2), 0.3), joint_b(bp(0.0, 0.2), 0.3), epsilon = 1e-12);
        assert_abs_diff_eq!(expression_b(bp(0.1, 0.2), 0.5), joint_b(bp(0.1, 0.2), 0.5), epsilon = 1e-12);
        // p2 -> 1/2 makes Y2 independent of Y1
        assert_abs_diff_eq!(expression_b(bp(0.1, 0.4999999999), 0.3), h2(star(0.3, 0.1)), epsilon = 1e-9);
    }

    #[test]
    fn fig11_regime() {
        let opt = OptimizerConfig::default();
        let cap = 1.0 - h2(0.2);
        for p2 in [0.01, 0.25, 0.49] {
            let p = bp(0.2, p2);
            assert_abs_diff_eq!(cb_in_new(p, &opt).value, cap, epsilon = 2e-3);
            assert_abs_diff_eq!(cb_out(p).value, cap, epsilon = 2e-3);
        }
    }

    #[test]
    fn cb_out_edges() {
        assert_eq!(cb_out(bp(0.0, 0.0)).value, 0.0);
        let p = bp(0.05, 0.25);
        assert!(cb_out(p).value >= cb_in(p) - 1e-9);
    }

    #[test]
    fn cb_in_new_at_least_cb_in() {
        let opt = OptimizerConfig::default();
        for (p1, p2) in [(0.05, 0.02), (0.1, 0.3), (0.3, 0.05)] {
            let p = bp(p1, p2);
            let r = cb_in_new(p, &opt);
            assert!(r.value >= cb_in(p) - 1e-6);
            let Argmax::Binary(arg) = r.argmax else { panic!() };
            assert!((cb_in_new_objective(p, &arg) - r.value).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_is_deterministic_and_formatted() {
        let opt = OptimizerConfig { restarts: 4, ..Default::default() };
        let a = sweep(0.1, &[0.05, 0.2], &opt).unwrap();
        let b = sweep(0.1, &[0.05, 0.2], &opt).unwrap();
        assert_eq!(a, b);
        let csv = sweep_csv(0.1, &a);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# p1=0.100000000000"));
        assert_eq!(lines[1], SWEEP_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(sweep(0.1, &[0.5], &opt).is_err());
    }

    fn params_strategy() -> impl Strategy<Value = (f64, f64, BinaryAuxParams)> {
        (0.0..0.5f64, 0.0..0.5f64, 0.0..=1.0f64, proptest::array::uniform4(0.0..=1.0f64))
            .prop_map(|(p1, p2, alpha, gamma)| (p1, p2, BinaryAuxParams { alpha, gamma }))
    }

    proptest! {
        #[test]
        fn a_is_mutual_information((p1, _p2, params) in params_strategy()) {
            prop_assert!((expression_a(p1, &params) - joint_a(p1, &params)).abs() < 1e-9);
        }

        #[test]
        fn b_is_conditional_entropy((p1, p2, params) in params_strategy()) {
            let p = bp(p1, p2);
            prop_assert!((expression_b(p, params.alpha) - joint_b(p, params.alpha)).abs() < 1e-9);
        }

        #[test]
        fn objective_symmetric_under_relabeling((p1, p2, params) in params_strategy()) {
            let p = bp(p1, p2);
            let d = cb_in_new_objective(p, &params) - cb_in_new_objective(p, &params.relabeled());
            prop_assert!(d.abs() < 1e-12);
        }

        #[test]
        fn closed_forms_in_unit_interval(p1 in 0.0..0.5f64, p2 in 0.0..0.5f64, alpha in 0.0..=1.0f64) {
            let p = bp(p1, p2);
            for v in [cb_s(p), cb_in(p), cb_out_objective(p, alpha), cb_in_objective(p, alpha)] {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            }
            prop_assert!(cb_in(p) >= cb_s(p) - 1e-12);
        }
    }
}
