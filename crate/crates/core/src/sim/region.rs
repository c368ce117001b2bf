//! The seven rate constraints of the secrecy scheme and their projection onto
//! the message rates.

use serde::Serialize;

use super::RateAllocation;
use crate::bounds::{AuxInfo, AuxiliarySystem, BoundsError};
use crate::channel::WiretapChannel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `R~ >= I(U,Y1;V)`: the quantizer codebook covers.
    Covering,
    /// `R* <= I(Y1;U)`.
    BinIndex,
    /// `R~ - R* <= I(Y1;V)`: the receiver resolves `v` inside its bin.
    BinPacking,
    /// `R1 + R2 + R' + R* <= I(Y1,V;U)`.
    Decoding,
    /// `R2 + R' + R* <= I(Y2;U)`.
    WiretapList,
    /// `R' + R* >= I(Y2;U) - H(Y1|Y2,U)`.
    KeyEquivocation,
    /// `R* >= I(V;U|Y1)`.
    QuantizerRate,
}

impl Constraint {
    pub const ALL: [Constraint; 7] = [
        Constraint::Covering,
        Constraint::BinIndex,
        Constraint::BinPacking,
        Constraint::Decoding,
        Constraint::WiretapList,
        Constraint::KeyEquivocation,
        Constraint::QuantizerRate,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            Constraint::Covering => "r_tilde >= I(U,Y1;V)",
            Constraint::BinIndex => "r_star <= I(Y1;U)",
            Constraint::BinPacking => "r_tilde - r_star <= I(Y1;V)",
            Constraint::Decoding => "r1 + r2 + r_prime + r_star <= I(Y1,V;U)",
            Constraint::WiretapList => "r2 + r_prime + r_star <= I(Y2;U)",
            Constraint::KeyEquivocation => "r_prime + r_star >= I(Y2;U) - H(Y1|Y2,U)",
            Constraint::QuantizerRate => "r_star >= I(V;U|Y1)",
        }
    }

    /// Slack of the inequality; negative means violated.
    fn margin(self, r: &RateAllocation, i: &AuxInfo) -> f64 {
        match self {
            Constraint::Covering => r.r_tilde - i.i_uy1_v,
            Constraint::BinIndex => i.i_y1_u - r.r_star,
            Constraint::BinPacking => i.i_y1_v - (r.r_tilde - r.r_star),
            Constraint::Decoding => i.i_y1v_u - (r.r1 + r.r2 + r.r_prime + r.r_star),
            Constraint::WiretapList => i.i_y2_u - (r.r2 + r.r_prime + r.r_star),
            Constraint::KeyEquivocation => r.r_prime + r.r_star - (i.i_y2_u - i.h_y1_given_y2u),
            Constraint::QuantizerRate => r.r_star - i.i_v_u_given_y1,
        }
    }
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub constraint: Constraint,
    pub description: &'static str,
    pub margin: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub info: AuxInfo,
    pub checks: Vec<ConstraintCheck>,
    /// `I(Y1;U) - (R1 + R2 + R')`.
    pub total_rate_margin: f64,
    /// `I(Y1,V;U) - I(Y2;U) + H(Y1|Y2,U) - (R1 + R2)`.
    pub secret_rate_margin: f64,
    /// `min{[I(Y1,V;U) - I(Y2;U)]+ + H(Y1|Y2,U), I(Y1;U)}`, the rate the
    /// constraints allow for `R1 + R2` at this auxiliary system.
    pub eliminated_bound: f64,
    /// `|I(Y1,V;U) - I(V;U|Y1) - I(Y1;U)|`; zero up to rounding.
    pub elimination_residual: f64,
}

impl RegionReport {
    pub fn feasible(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn violated(&self) -> Vec<Constraint> {
        self.checks.iter().filter(|c| !c.satisfied).map(|c| c.constraint).collect()
    }
}

/// Evaluates every constraint at the joint assembled from `aux` and `ch`.
pub fn rate_region_check(
    ch: &WiretapChannel,
    aux: &AuxiliarySystem,
    rates: &RateAllocation,
) -> Result<RegionReport, BoundsError> {
    Ok(region_from_info(aux.info(ch)?, rates))
}

pub fn region_from_info(info: AuxInfo, rates: &RateAllocation) -> RegionReport {
    // a rate exactly on the boundary is admissible
    const TOL: f64 = 1e-12;
    let checks = Constraint::ALL
        .iter()
        .map(|&c| {
            let margin = c.margin(rates, &info);
            ConstraintCheck { constraint: c, description: c.describe(), margin, satisfied: margin >= -TOL }
        })
        .collect();
    let secret = info.i_y1v_u - info.i_y2_u + info.h_y1_given_y2u;
    RegionReport {
        info,
        checks,
        total_rate_margin: info.i_y1_u - (rates.r1 + rates.r2 + rates.r_prime),
        secret_rate_margin: secret - (rates.r1 + rates.r2),
        eliminated_bound: ((info.i_y1v_u - info.i_y2_u).max(0.0) + info.h_y1_given_y2u).min(info.i_y1_u),
        elimination_residual: (info.i_y1v_u - info.i_v_u_given_y1 - info.i_y1_u).abs(),
    }
}

impl RateAllocation {
    /// Rates at `fraction` of the corner of the region for `info`: the
    /// quantizer runs at its covering and minimum bin rates, and the message
    /// rates take `fraction` of what remains.
    pub fn corner(info: &AuxInfo, fraction: f64) -> Self {
        let r_star = info.i_v_u_given_y1;
        let r_tilde = info.i_uy1_v;
        let r_prime = (info.i_y2_u - info.h_y1_given_y2u - r_star).max(0.0);
        let r2 = fraction * info.h_y1_given_y2u.min(info.i_y2_u - r_prime - r_star).max(0.0);
        let r1 = (fraction * (info.i_y1v_u - r_prime - r_star) - r2).max(0.0);
        Self { r1, r2, r_prime, r_star, r_tilde }
    }
}
