//! Secrecy bounds for general discrete wiretap channels with noiseless feedback.
//!
//! Every bound is a maximum over an auxiliary system `P(u) P(x|u) P(v|u,y1)`
//! of an information expression of the joint `(u, v, x, y1, y2)`. Bounds that
//! only range over `P(x)` fix `U = X`; bounds without `V` fix `|V| = 1`.

use serde::Serialize;
use thiserror::Error;

use crate::binary::BinaryAuxParams;
use crate::channel::{StructureTag, WiretapChannel};
use crate::info::{
    assemble_unchecked, axis, conditional_entropy_unchecked as ce, mutual_information_unchecked as mi,
    ConditionalPmf, InfoError, JointPmf, Pmf,
};
use crate::optim::{self, Block, OptimizerConfig, OptimizerTrace, SimplexDomain};

/// Largest input or output alphabet accepted by the general optimizer.
pub const MAX_GENERAL_ALPHABET: usize = 4;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
    #[error("{bound} requires a {required:?} channel, got {found:?}")]
    Structure {
        bound: BoundKind,
        required: StructureTag,
        found: StructureTag,
    },
    #[error("alphabets ({x}, {y1}, {y2}) exceed the general optimizer cap of {MAX_GENERAL_ALPHABET}")]
    TooLarge { x: usize, y1: usize, y2: usize },
    #[error("|{var}| = {size} violates the cap {cap}")]
    Cardinality { var: &'static str, size: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, BoundsError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Degraded channel without feedback, `max_{P(x)} I(X;Y1) - I(X;Y2)`.
    CdWyner,
    Cs,
    Rs,
    /// Degraded channel with feedback.
    Cdf,
    RStar,
    CfOut,
    RDoubleStar,
    CfStarOut,
    RNon,
    /// Binary closed forms.
    CbS,
    CbIn,
    CbInNew,
    CbOut,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::CdWyner => "cd",
            BoundKind::Cs => "cs",
            BoundKind::Rs => "rs",
            BoundKind::Cdf => "cdf",
            BoundKind::RStar => "rstar",
            BoundKind::CfOut => "cfout",
            BoundKind::RDoubleStar => "rdstar",
            BoundKind::CfStarOut => "cfstarout",
            BoundKind::RNon => "rnon",
            BoundKind::CbS => "cb_s",
            BoundKind::CbIn => "cb_in",
            BoundKind::CbInNew => "cb_in_new",
            BoundKind::CbOut => "cb_out",
        }
    }
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `P(u)`, `P(x|u)` and `P(v|u,y1)` with `|U| <= |X| + 1`, `|V| <= |X| + 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxiliarySystem {
    pub u_size: usize,
    pub v_size: usize,
    pub pu: Pmf,
    pub px_given_u: ConditionalPmf,
    pub pv_given_uy1: ConditionalPmf,
}

impl AuxiliarySystem {
    pub fn new(
        x_size: usize,
        y1_size: usize,
        pu: Pmf,
        px_given_u: ConditionalPmf,
        pv_given_uy1: ConditionalPmf,
    ) -> Result<Self> {
        let u_size = pu.len();
        let v_size = pv_given_uy1.output_size();
        if u_size > x_size + 1 {
            return Err(BoundsError::Cardinality { var: "U", size: u_size, cap: x_size + 1 });
        }
        if v_size > x_size + 2 {
            return Err(BoundsError::Cardinality { var: "V", size: v_size, cap: x_size + 2 });
        }
        if px_given_u.input_sizes() != [u_size] || px_given_u.output_size() != x_size {
            return Err(InfoError::DimensionMismatch("P(x|u) shape".into()).into());
        }
        if pv_given_uy1.input_sizes() != [u_size, y1_size] {
            return Err(InfoError::DimensionMismatch("P(v|u,y1) shape".into()).into());
        }
        Ok(Self { u_size, v_size, pu, px_given_u, pv_given_uy1 })
    }

    /// `U = X` with input law `px` and a constant `V`.
    pub fn from_input(px: &Pmf, y1_size: usize) -> Result<Self> {
        let n = px.len();
        Self::new(
            n,
            y1_size,
            px.clone(),
            ConditionalPmf::identity(n)?,
            ConditionalPmf::constant(vec![n, y1_size], &Pmf::point_mass(1, 0)?)?,
        )
    }

    pub fn joint(&self, ch: &WiretapChannel) -> Result<JointPmf> {
        Ok(crate::info::assemble_joint(&self.pu, &self.px_given_u, ch.law(), &self.pv_given_uy1)?)
    }

    /// Information quantities the bounds and the rate region are built from.
    pub fn info(&self, ch: &WiretapChannel) -> Result<AuxInfo> {
        Ok(AuxInfo::of(&self.joint(ch)?))
    }
}

/// Information terms of an assembled `(u, v, x, y1, y2)` joint, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxInfo {
    pub i_y1_u: f64,
    pub i_y2_u: f64,
    pub i_y1v_u: f64,
    pub h_y1_given_y2u: f64,
    pub h_y1_given_y2: f64,
    pub i_uy1_v: f64,
    pub i_y1_v: f64,
    pub i_v_u_given_y1: f64,
}

impl AuxInfo {
    pub fn of(j: &JointPmf) -> Self {
        use axis::{U, V, Y1, Y2};
        Self {
            i_y1_u: mi(j, &[Y1], &[U]),
            i_y2_u: mi(j, &[Y2], &[U]),
            i_y1v_u: mi(j, &[Y1, V], &[U]),
            h_y1_given_y2u: ce(j, &[Y1], &[Y2, U]),
            h_y1_given_y2: ce(j, &[Y1], &[Y2]),
            i_uy1_v: mi(j, &[U, Y1], &[V]),
            i_y1_v: mi(j, &[Y1], &[V]),
            i_v_u_given_y1: (ce(j, &[V], &[Y1]) - ce(j, &[V], &[Y1, U])).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Argmax {
    Aux(AuxiliarySystem),
    Binary(BinaryAuxParams),
    /// `P(x = 0)` of a binary input law.
    Alpha(f64),
    /// Closed forms with nothing to report.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub bound_kind: BoundKind,
    /// Bits per channel use.
    pub value: f64,
    pub argmax: Argmax,
    pub optimizer_trace: Option<OptimizerTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct BoundsConfig {
    pub optimizer: OptimizerConfig,
    /// Overrides `|V|` (1 forces a constant `V`).
    pub v_size: Option<usize>,
    /// Overrides `|U|` for the bounds that carry a free `U`.
    pub u_size: Option<usize>,
}

/// Which distributions an objective ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxShape {
    pub u_size: usize,
    pub v_size: usize,
    /// `false` pins `U = X`.
    pub free_x_given_u: bool,
}

impl AuxShape {
    /// Free `U` and `V` at the cardinality caps.
    pub fn full(ch: &WiretapChannel) -> Self {
        Self { u_size: ch.x_size() + 1, v_size: ch.x_size() + 2, free_x_given_u: true }
    }

    /// `U = X` with constant `V`.
    pub fn input_only(ch: &WiretapChannel) -> Self {
        Self { u_size: ch.x_size(), v_size: 1, free_x_given_u: false }
    }
}

/// Parameter vector layout: `P(u)`, then the `P(x|u)` rows when free, then the
/// `P(v|u,y1)` rows when `|V| > 1`.
struct Layout {
    shape: AuxShape,
    nx: usize,
    ny1: usize,
    ny2: usize,
}

impl Layout {
    fn domain(&self, resolution: usize) -> SimplexDomain {
        let s = self.shape;
        let mut blocks = vec![Block { size: s.u_size, resolution }];
        if s.free_x_given_u {
            blocks.extend(SimplexDomain::repeated(s.u_size, self.nx, resolution));
        }
        if s.v_size > 1 {
            blocks.extend(SimplexDomain::repeated(s.u_size * self.ny1, s.v_size, resolution));
        }
        SimplexDomain::new(blocks)
    }

    fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], Option<&'a [f64]>, Option<&'a [f64]>) {
        let s = self.shape;
        let (pu, rest) = x.split_at(s.u_size);
        let (pxu, rest) = if s.free_x_given_u {
            let (a, b) = rest.split_at(s.u_size * self.nx);
            (Some(a), b)
        } else {
            (None, rest)
        };
        (pu, pxu, (s.v_size > 1).then_some(rest))
    }

    fn joint(&self, x: &[f64], ch: &[f64]) -> JointPmf {
        let s = self.shape;
        let (pu, pxu, pv) = self.split(x);
        let ident;
        let pxu = match pxu {
            Some(t) => t,
            None => {
                ident = identity_table(s.u_size);
                &ident
            }
        };
        let ones;
        let pv = match pv {
            Some(t) => t,
            None => {
                ones = vec![1.0; s.u_size * self.ny1];
                &ones
            }
        };
        assemble_unchecked(pu, pxu, ch, pv, [s.u_size, s.v_size, self.nx, self.ny1, self.ny2])
    }

    fn aux(&self, x: &[f64]) -> AuxiliarySystem {
        let s = self.shape;
        let (pu, pxu, pv) = self.split(x);
        let pxu = pxu.map(<[f64]>::to_vec).unwrap_or_else(|| identity_table(s.u_size));
        let pv = pv.map(<[f64]>::to_vec).unwrap_or_else(|| vec![1.0; s.u_size * self.ny1]);
        AuxiliarySystem {
            u_size: s.u_size,
            v_size: s.v_size,
            pu: Pmf::new(pu.to_vec()).expect("optimizer keeps the simplex"),
            px_given_u: ConditionalPmf::new(vec![s.u_size], self.nx, pxu).expect("optimizer keeps the simplex"),
            pv_given_uy1: ConditionalPmf::new(vec![s.u_size, self.ny1], s.v_size, pv)
                .expect("optimizer keeps the simplex"),
        }
    }

    /// Inverse of [`Layout::aux`]; `None` when the system does not fit the shape.
    fn encode(&self, a: &AuxiliarySystem) -> Option<Vec<f64>> {
        let s = self.shape;
        if a.u_size != s.u_size || a.px_given_u.output_size() != self.nx {
            return None;
        }
        let mut out = a.pu.probs().to_vec();
        if s.free_x_given_u {
            out.extend_from_slice(a.px_given_u.table());
        } else if a.px_given_u.table() != identity_table(s.u_size).as_slice() {
            return None;
        }
        if s.v_size > 1 {
            if a.v_size == s.v_size {
                out.extend_from_slice(a.pv_given_uy1.table());
            } else if a.v_size == 1 {
                // constant V embeds as a point mass on the first symbol
                for _ in 0..s.u_size * self.ny1 {
                    out.push(1.0);
                    out.extend(std::iter::repeat(0.0).take(s.v_size - 1));
                }
            } else {
                return None;
            }
        } else if a.v_size != 1 {
            return None;
        }
        Some(out)
    }
}

fn identity_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        t[i * n + i] = 1.0;
    }
    t
}

fn check_size(ch: &WiretapChannel) -> Result<()> {
    let (x, y1, y2) = (ch.x_size(), ch.y1_size(), ch.y2_size());
    if x > MAX_GENERAL_ALPHABET || y1 > MAX_GENERAL_ALPHABET || y2 > MAX_GENERAL_ALPHABET {
        return Err(BoundsError::TooLarge { x, y1, y2 });
    }
    Ok(())
}

fn require(ch: &WiretapChannel, bound: BoundKind, required: StructureTag) -> Result<()> {
    if ch.structure() != required {
        return Err(BoundsError::Structure { bound, required, found: ch.structure() });
    }
    Ok(())
}

/// Maximizes `objective` of the assembled joint over the auxiliary systems of
/// `shape`. `seeds` are ascended alongside the grid starts.
pub fn optimize<F>(
    kind: BoundKind,
    objective: F,
    ch: &WiretapChannel,
    shape: AuxShape,
    config: &OptimizerConfig,
    seeds: &[AuxiliarySystem],
) -> Result<BoundResult>
where
    F: Fn(&JointPmf) -> f64 + Sync,
{
    check_size(ch)?;
    if shape.u_size > ch.x_size() + 1 {
        return Err(BoundsError::Cardinality { var: "U", size: shape.u_size, cap: ch.x_size() + 1 });
    }
    if shape.v_size > ch.x_size() + 2 {
        return Err(BoundsError::Cardinality { var: "V", size: shape.v_size, cap: ch.x_size() + 2 });
    }
    if !shape.free_x_given_u && shape.u_size != ch.x_size() {
        return Err(InfoError::DimensionMismatch("U = X needs |U| = |X|".into()).into());
    }
    let layout = Layout { shape, nx: ch.x_size(), ny1: ch.y1_size(), ny2: ch.y2_size() };
    let law = ch.law().table();
    let starts: Vec<Vec<f64>> = seeds.iter().filter_map(|a| layout.encode(a)).collect();
    let opt = optim::maximize(
        &layout.domain(config.grid_resolution),
        |x| objective(&layout.joint(x, law)),
        config,
        &starts,
    );
    Ok(BoundResult {
        bound_kind: kind,
        value: opt.value,
        argmax: Argmax::Aux(layout.aux(&opt.point)),
        optimizer_trace: Some(opt.trace),
    })
}

/// Re-evaluates a bound's objective at an auxiliary system.
pub fn objective_value(kind: BoundKind, ch: &WiretapChannel, aux: &AuxiliarySystem) -> Result<f64> {
    let j = aux.joint(ch)?;
    Ok(objective_fn(kind)(&j))
}

fn pos(v: f64) -> f64 {
    v.max(0.0)
}

/// The bound expression as a function of the assembled joint.
pub fn objective_fn(kind: BoundKind) -> fn(&JointPmf) -> f64 {
    use axis::{U, V, X, Y1, Y2};
    match kind {
        BoundKind::CdWyner => |j| mi(j, &[Y1], &[X]) - mi(j, &[Y2], &[X]),
        BoundKind::Cs => |j| pos(mi(j, &[Y1], &[U]) - mi(j, &[Y2], &[U])),
        BoundKind::Rs => |j| {
            let i1 = mi(j, &[Y1], &[U]);
            (pos(i1 - mi(j, &[Y2], &[U])) + ce(j, &[Y1], &[Y2, U])).min(i1)
        },
        BoundKind::Cdf => |j| {
            let i1 = mi(j, &[Y1], &[X]);
            (i1 - mi(j, &[Y2], &[X]) + ce(j, &[Y1], &[Y2, X])).min(i1)
        },
        BoundKind::RStar => |j| {
            let gain = pos(mi(j, &[Y1, V], &[U]) - mi(j, &[Y2], &[U]));
            (gain + ce(j, &[Y1], &[Y2, U])).min(mi(j, &[Y1], &[U]))
        },
        BoundKind::CfOut => |j| ce(j, &[Y1], &[Y2]).min(mi(j, &[Y1], &[U])),
        BoundKind::RDoubleStar => |j| {
            let gain = pos(mi(j, &[X], &[Y1, V]) - mi(j, &[X], &[Y2]));
            (gain + ce(j, &[Y1], &[X])).min(mi(j, &[X], &[Y1]))
        },
        BoundKind::CfStarOut => |j| ce(j, &[Y1], &[Y2]).min(mi(j, &[X], &[Y1])),
        BoundKind::RNon => |j| {
            let i1 = mi(j, &[X], &[Y1]);
            (pos(i1 - mi(j, &[X], &[Y2])) + ce(j, &[Y1], &[X])).min(i1)
        },
        BoundKind::CbS | BoundKind::CbIn | BoundKind::CbInNew | BoundKind::CbOut => {
            panic!("{kind} is a binary closed form, not a joint objective")
        }
    }
}

fn u_shape(ch: &WiretapChannel, cfg: &BoundsConfig) -> AuxShape {
    AuxShape { u_size: cfg.u_size.unwrap_or(ch.x_size() + 1), v_size: 1, free_x_given_u: true }
}

fn run(
    kind: BoundKind,
    ch: &WiretapChannel,
    shape: AuxShape,
    cfg: &BoundsConfig,
    seeds: &[AuxiliarySystem],
) -> Result<BoundResult> {
    optimize(kind, objective_fn(kind), ch, shape, &cfg.optimizer, seeds)
}

fn aux_of(r: &BoundResult) -> Vec<AuxiliarySystem> {
    match &r.argmax {
        Argmax::Aux(a) => vec![a.clone()],
        _ => Vec::new(),
    }
}

/// `max_{P(x)} [I(X;Y1) - I(X;Y2)]` for physically degraded channels.
pub fn c_d_wyner(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<BoundResult> {
    require(ch, BoundKind::CdWyner, StructureTag::PhysicallyDegraded)?;
    run(BoundKind::CdWyner, ch, AuxShape::input_only(ch), cfg, &[])
}

/// `max_{P(x)} min{I(X;Y1) - I(X;Y2) + H(Y1|Y2,X), I(X;Y1)}` for physically degraded channels.
pub fn c_df_degraded(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<BoundResult> {
    require(ch, BoundKind::Cdf, StructureTag::PhysicallyDegraded)?;
    run(BoundKind::Cdf, ch, AuxShape::input_only(ch), cfg, &[])
}

/// `max_{P(u),P(x|u)} [I(Y1;U) - I(Y2;U)]+`.
pub fn cs_general(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<BoundResult> {
    run(BoundKind::Cs, ch, u_shape(ch, cfg), cfg, &[])
}

/// `max_{P(u),P(x|u)} min{[I(Y1;U) - I(Y2;U)]+ + H(Y1|Y2,U), I(Y1;U)}`.
pub fn r_s_ahlswede_cai(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<BoundResult> {
    run(BoundKind::Rs, ch, u_shape(ch, cfg), cfg, &[])
}

/// `max min{[I(Y1,V;U) - I(Y2;U)]+ + H(Y1|Y2,U), I(Y1;U)}` over the full
/// auxiliary system. The ascent is seeded with the constant-`V` embedding of
/// the `r_s` argmax, so the result never falls below `r_s`.
pub fn r_star_s(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<BoundResult> {
    let rs = r_s_ahlswede_cai(ch, cfg)?;
    r_star_s_seeded(ch, cfg, &aux_of(&rs))
}

pub fn r_star_s_seeded(ch: &WiretapChannel, cfg: &BoundsConfig, seeds: &[AuxiliarySystem]) -> Result<BoundResult> {
    let mut shape = AuxShape::full(ch);
    if let Some(u) = cfg.u_size {
        shape.u_size = u;
    }
    if let Some(v) = cfg.v_size {
        shape.v_size = v;
    }
    run(BoundKind::RStar, ch, shape, cfg, seeds)
}

/// `max_{P(u,x)} min{H(Y1|Y2), I(Y1;U)}`.
pub fn c_f_out(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<BoundResult> {
    run(BoundKind::CfOut, ch, u_shape(ch, cfg), cfg, &[])
}

/// `max_{P(x),P(v|x,y1)} min{[I(X;Y1,V) - I(X;Y2)]+ + H(Y1|X), I(X;Y1)}` for non-degraded channels.
pub fn r_double_star_nondegraded(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<BoundResult> {
    require(ch, BoundKind::RDoubleStar, StructureTag::NonDegraded)?;
    let rnon = r_non_ahlswede_cai_nondegraded(ch, cfg)?;
    let shape = AuxShape {
        u_size: ch.x_size(),
        v_size: cfg.v_size.unwrap_or(ch.x_size() + 2),
        free_x_given_u: false,
    };
    run(BoundKind::RDoubleStar, ch, shape, cfg, &aux_of(&rnon))
}

/// `max_{P(x)} min{H(Y1|Y2), I(X;Y1)}` for non-degraded channels.
pub fn c_f_star_out_nondegraded(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<BoundResult> {
    require(ch, BoundKind::CfStarOut, StructureTag::NonDegraded)?;
    run(BoundKind::CfStarOut, ch, AuxShape::input_only(ch), cfg, &[])
}

/// `max_{P(x)} min{[I(X;Y1) - I(X;Y2)]+ + H(Y1|X), I(X;Y1)}` for non-degraded channels.
pub fn r_non_ahlswede_cai_nondegraded(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<BoundResult> {
    require(ch, BoundKind::RNon, StructureTag::NonDegraded)?;
    run(BoundKind::RNon, ch, AuxShape::input_only(ch), cfg, &[])
}

/// The four general bounds with each optimization seeded by the previous
/// argmax, so `cs <= rs <= rstar` and `rs <= cfout` hold by construction.
pub fn ordered_general_bounds(ch: &WiretapChannel, cfg: &BoundsConfig) -> Result<[BoundResult; 4]> {
    let cs = cs_general(ch, cfg)?;
    let rs = run(BoundKind::Rs, ch, u_shape(ch, cfg), cfg, &aux_of(&cs))?;
    let rstar = r_star_s_seeded(ch, cfg, &aux_of(&rs))?;
    let mut seeds = aux_of(&rs);
    // the P(u,x) part of the rstar argmax, with V dropped
    if let Argmax::Aux(a) = &rstar.argmax {
        seeds.push(AuxiliarySystem {
            v_size: 1,
            pv_given_uy1: ConditionalPmf::constant(vec![a.u_size, ch.y1_size()], &Pmf::point_mass(1, 0)?)?,
            ..a.clone()
        });
    }
    let cfout = run(BoundKind::CfOut, ch, u_shape(ch, cfg), cfg, &seeds)?;
    Ok([cs, rs, rstar, cfout])
}

/// `I(Y1;X) - I(Y2;X) + H(Y1|Y2,X) - H(Y1|Y2)` at input law `px`; zero on
/// physically degraded channels.
pub fn degraded_identity_residual(ch: &WiretapChannel, px: &Pmf) -> Result<f64> {
    use axis::{X, Y1, Y2};
    let j = AuxiliarySystem::from_input(px, ch.y1_size())?.joint(ch)?;
    let lhs = mi(&j, &[Y1], &[X]) - mi(&j, &[Y2], &[X]) + ce(&j, &[Y1], &[Y2, X]);
    Ok(lhs - ce(&j, &[Y1], &[Y2]))
}

/// `(I(Y,V;X) - I(V;X|Y), I(X;Y))` for input `px`, channel `P(y|x)` and
/// quantizer `P(v|x,y)`. The two agree for every quantizer.
pub fn dmc_feedback_rate_identity(
    ch_main: &ConditionalPmf,
    aux: &ConditionalPmf,
    px: &Pmf,
) -> Result<(f64, f64)> {
    let nx = px.len();
    if ch_main.input_sizes() != [nx] {
        return Err(InfoError::DimensionMismatch("P(y|x) input vs P(x)".into()).into());
    }
    let ny = ch_main.output_size();
    if aux.input_sizes() != [nx, ny] {
        return Err(InfoError::DimensionMismatch("P(v|x,y) inputs vs (|X|, |Y|)".into()).into());
    }
    // U = X, Y1 = Y, trivial Y2
    let j = crate::info::assemble_joint(px, &ConditionalPmf::identity(nx)?, ch_main, aux)?;
    use axis::{V, X, Y1};
    let i_v_x_given_y = ce(&j, &[V], &[Y1]) - ce(&j, &[V], &[Y1, X]);
    let lhs = mi(&j, &[Y1, V], &[X]) - i_v_x_given_y;
    Ok((lhs, mi(&j, &[X], &[Y1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_binary_channel, make_degraded_channel, BinaryWiretapParams};
    use crate::info::h2;
    use approx::assert_abs_diff_eq;

    fn binary(p1: f64, p2: f64) -> WiretapChannel {
        make_binary_channel(BinaryWiretapParams::new(p1, p2).unwrap())
    }

    fn quick() -> BoundsConfig {
        BoundsConfig {
            optimizer: OptimizerConfig { max_grid_points: 4000, restarts: 6, ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn constant_objective() {
        let ch = binary(0.1, 0.2);
        let r = optimize(BoundKind::Cs, |_| 0.3, &ch, AuxShape::full(&ch), &quick().optimizer, &[]).unwrap();
        assert_eq!(r.value, 0.3);
    }

    #[test]
    fn bsc_capacity() {
        let main = ConditionalPmf::bsc(0.1).unwrap();
        let ch = make_degraded_channel(&main, &ConditionalPmf::identity(2).unwrap()).unwrap();
        let f = |j: &JointPmf| mi(j, &[axis::X], &[axis::Y1]);
        let r = optimize(BoundKind::CdWyner, f, &ch, AuxShape::input_only(&ch), &quick().optimizer, &[]).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 - h2(0.1), epsilon = 1e-9);
    }

    #[test]
    fn degraded_binary_secrecy() {
        // BSC(0.1) then BSC(0.15): wiretap crossover 0.1 * 0.15 composed
        let ch = make_degraded_channel(&ConditionalPmf::bsc(0.1).unwrap(), &ConditionalPmf::bsc(0.15).unwrap())
            .unwrap();
        let expected = h2(0.1 * 0.85 + 0.9 * 0.15) - h2(0.1);
        let cs = cs_general(&ch, &quick()).unwrap();
        assert_abs_diff_eq!(cs.value, expected, epsilon = 1e-6);
        let cd = c_d_wyner(&ch, &quick()).unwrap();
        assert_abs_diff_eq!(cd.value, expected, epsilon = 1e-9);
    }

    #[test]
    fn binary_cs_and_rs_closed_forms() {
        for (p1, p2) in [(0.1, 0.2), (0.2, 0.1), (0.05, 0.3), (0.15, 0.15)] {
            let ch = binary(p1, p2);
            let cs = cs_general(&ch, &quick()).unwrap();
            assert_abs_diff_eq!(cs.value, (h2(p2) - h2(p1)).max(0.0), epsilon = 1e-6);
            let rs = r_s_ahlswede_cai(&ch, &quick()).unwrap();
            let closed = ((h2(p2) - h2(p1)).max(0.0) + h2(p1)).min(1.0 - h2(p1));
            assert_abs_diff_eq!(rs.value, closed, epsilon = 1e-6);
            let rnon = r_non_ahlswede_cai_nondegraded(&ch, &quick()).unwrap();
            assert_abs_diff_eq!(rnon.value, closed, epsilon = 1e-6);
        }
    }

    #[test]
    fn rs_noiseless_main_and_capped_main() {
        let rs = r_s_ahlswede_cai(&binary(0.0, 0.3), &quick()).unwrap();
        assert_abs_diff_eq!(rs.value, h2(0.3).min(1.0), epsilon = 1e-6);
        let rs = r_s_ahlswede_cai(&binary(0.2, 0.4), &quick()).unwrap();
        assert_abs_diff_eq!(rs.value, 0.2780719051126377, epsilon = 1e-6);
    }

    #[test]
    fn rnon_with_noiseless_wiretap() {
        let r = r_non_ahlswede_cai_nondegraded(&binary(0.1, 0.0), &quick()).unwrap();
        assert_abs_diff_eq!(r.value, h2(0.1).min(1.0 - h2(0.1)), epsilon = 1e-6);
    }

    #[test]
    fn cfstarout_with_noiseless_wiretap() {
        // Y2 = X, so H(Y1|Y2) = h(p1) at every input law
        let r = c_f_star_out_nondegraded(&binary(0.1, 0.0), &quick()).unwrap();
        assert_abs_diff_eq!(r.value, h2(0.1).min(1.0 - h2(0.1)), epsilon = 1e-6);
    }

    #[test]
    fn reported_value_is_reproduced_by_argmax() {
        let ch = binary(0.1, 0.3);
        for r in ordered_general_bounds(&ch, &quick()).unwrap() {
            let Argmax::Aux(a) = &r.argmax else { panic!() };
            let v = objective_value(r.bound_kind, &ch, a).unwrap();
            assert!((v - r.value).abs() < 1e-9, "{}: {v} vs {}", r.bound_kind, r.value);
        }
    }

    #[test]
    fn constant_v_reduction() {
        let ch = binary(0.1, 0.3);
        let cfg = BoundsConfig { v_size: Some(1), ..quick() };
        let rs = r_s_ahlswede_cai(&ch, &cfg).unwrap();
        let rstar = r_star_s(&ch, &cfg).unwrap();
        assert!((rstar.value - rs.value).abs() < 1e-6);
    }

    #[test]
    fn structure_errors() {
        let degraded =
            make_degraded_channel(&ConditionalPmf::bsc(0.1).unwrap(), &ConditionalPmf::bsc(0.2).unwrap()).unwrap();
        assert!(matches!(
            r_non_ahlswede_cai_nondegraded(&degraded, &quick()),
            Err(BoundsError::Structure { .. })
        ));
        assert!(matches!(c_df_degraded(&binary(0.1, 0.2), &quick()), Err(BoundsError::Structure { .. })));
    }

    #[test]
    fn oversized_channel_rejected() {
        let main = ConditionalPmf::identity(5).unwrap();
        let ch = make_degraded_channel(&main, &main).unwrap();
        assert!(matches!(cs_general(&ch, &quick()), Err(BoundsError::TooLarge { .. })));
    }

    #[test]
    fn cardinality_caps() {
        let pu = Pmf::uniform(4).unwrap();
        let pxu = ConditionalPmf::constant(vec![4], &Pmf::uniform(2).unwrap()).unwrap();
        let pv = ConditionalPmf::constant(vec![4, 2], &Pmf::uniform(2).unwrap()).unwrap();
        assert!(matches!(AuxiliarySystem::new(2, 2, pu, pxu, pv), Err(BoundsError::Cardinality { var: "U", .. })));
    }

    #[test]
    fn dmc_identity_examples() {
        let bsc = ConditionalPmf::bsc(0.1).unwrap();
        let px = Pmf::uniform(2).unwrap();
        let constant = ConditionalPmf::constant(vec![2, 2], &Pmf::point_mass(1, 0).unwrap()).unwrap();
        let copy_x = ConditionalPmf::new(vec![2, 2], 2, vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        for aux in [constant, copy_x] {
            let (lhs, rhs) = dmc_feedback_rate_identity(&bsc, &aux, &px).unwrap();
            assert_abs_diff_eq!(lhs, 1.0 - h2(0.1), epsilon = 1e-12);
            assert_abs_diff_eq!(rhs, 1.0 - h2(0.1), epsilon = 1e-12);
        }
    }

    #[test]
    fn degraded_identity_on_binary_composition() {
        let ch = make_degraded_channel(&ConditionalPmf::bsc(0.1).unwrap(), &ConditionalPmf::bsc(0.2).unwrap())
            .unwrap();
        for a in [0.0, 0.2, 0.5, 0.9] {
            let r = degraded_identity_residual(&ch, &Pmf::binary(a).unwrap()).unwrap();
            assert!(r.abs() < 1e-12, "{r}");
        }
    }
}
