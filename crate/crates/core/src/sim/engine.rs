//! Block-Markov encoder, channel and backward decoder shared by the
//! point-to-point and the wiretap simulations.
//!
//! Block `i` sends `u_i(w1, w2 xor k_i, w', w*_{i-1})`. After block `i < n`
//! the transmitter quantizes `(u_i, y1_i)` to `v_i` and its bin index becomes
//! `w*_i`; the key `k_{i+1}` is the coloring of `y1_i`. Block 1 has no key and
//! `w*_0 = 0`; block `n` carries only `w*_{n-1}`. The receiver decodes from
//! block `n` backwards, and a failed step invalidates every earlier block.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::codebook::{draw, keyed_rng, Codebook, U_BOOK, V_BOOK};
use super::coloring::{chi_square_uniformity, empirical_mutual_information, KeyColoring};
use super::exact::{exact_small_equivocation, EXACT_MAX_BLOCK_LEN};
use super::region::rate_region_check;
use super::typical::{any_of, competitor_probability, ln_factorials, TypicalTable};
use super::{BlockBits, CodebookMode, SimConfig, SimError, SimMode, SimReport};
use crate::bounds::{AuxInfo, AuxiliarySystem};
use crate::channel::WiretapChannel;
use crate::info::{axis, ConditionalPmf, Pmf};

/// Rejection attempts when drawing a quantization jointly typical with `(u, y1)`.
const COVER_DRAWS: usize = 1000;
/// Longer keys are histogrammed on their low bits, uniform whenever the key is.
const KEY_HISTOGRAM_BITS: u32 = 16;

pub(crate) struct Scheme<'a> {
    cfg: &'a SimConfig,
    bits: BlockBits,
    explicit: bool,
    nu: usize,
    nv: usize,
    nx: usize,
    ny1: usize,
    ny2: usize,
    pu: Vec<f64>,
    pv: Vec<f64>,
    px_u: Vec<f64>,
    pv_uy1: Vec<f64>,
    law: Vec<f64>,
    /// side `(y1, v)`, codeword `u`
    t_u_y1v: TypicalTable,
    /// side `y1`, codeword `u`
    t_u_y1: TypicalTable,
    /// side `y1`, codeword `v`
    t_v_y1: TypicalTable,
    /// side `(u, y1)`, codeword `v`
    t_v_uy1: TypicalTable,
    lnf: Vec<f64>,
    coloring: KeyColoring,
}

struct Block {
    u: Vec<usize>,
    y1: Vec<usize>,
    v: Vec<usize>,
    u_index: u64,
    v_index: u64,
}

struct TrialOutcome {
    errors: f64,
    cover_failures: usize,
    keys: Vec<(u64, u64)>,
}

fn pow2(bits: u32) -> u64 {
    1u64 << bits
}

/// Candidate count as a float; ensemble searches may exceed 64 index bits.
fn count2(bits: u32) -> f64 {
    (bits as f64).exp2()
}

impl<'a> Scheme<'a> {
    pub(crate) fn new(
        ch: &WiretapChannel,
        aux: &AuxiliarySystem,
        cfg: &'a SimConfig,
        coloring: KeyColoring,
    ) -> Result<Self, SimError> {
        let bits = BlockBits::new(&cfg.rates, cfg.block_len);
        let explicit = bits.u_bits().max(bits.b_tilde) <= cfg.explicit_max_bits;
        let j = aux.joint(ch)?;
        let (nu, nv, nx, ny1, ny2) = (aux.u_size, aux.v_size, ch.x_size(), ch.y1_size(), ch.y2_size());
        use axis::{U, V, Y1};
        let tab = |axes: &[usize]| TypicalTable::new(j.marginal_table(axes).1, cfg.epsilon, cfg.block_len);
        Ok(Self {
            cfg,
            bits,
            explicit,
            nu,
            nv,
            nx,
            ny1,
            ny2,
            pu: aux.pu.probs().to_vec(),
            pv: j.marginal_table(&[V]).1,
            px_u: aux.px_given_u.table().to_vec(),
            pv_uy1: aux.pv_given_uy1.table().to_vec(),
            law: ch.law().table().to_vec(),
            t_u_y1v: tab(&[Y1, V, U]),
            t_u_y1: tab(&[Y1, U]),
            t_v_y1: tab(&[Y1, V]),
            t_v_uy1: tab(&[U, Y1, V]),
            lnf: ln_factorials(cfg.block_len),
            coloring,
        })
    }

    fn pack(&self, w1: u64, c: u64, wp: u64, ws: u64) -> u64 {
        let b = &self.bits;
        (((w1 << b.b2 | c) << b.b_prime | wp) << b.b_star) | ws
    }

    fn side_counts(&self, f: impl Fn(usize) -> usize, sides: usize) -> Vec<usize> {
        let mut c = vec![0; sides];
        for t in 0..self.cfg.block_len {
            c[f(t)] += 1;
        }
        c
    }

    fn typical_u(&self, u: &[usize], y1: &[usize], v: &[usize]) -> bool {
        self.t_u_y1v.check_with(|t| (y1[t] * self.nv + v[t]) * self.nu + u[t])
    }

    fn typical_v_cover(&self, u: &[usize], y1: &[usize], v: &[usize]) -> bool {
        self.t_v_uy1.check_with(|t| (u[t] * self.ny1 + y1[t]) * self.nv + v[t])
    }

    /// The single candidate passing `test`, if exactly one does.
    fn unique(&self, book: &Codebook, candidates: impl Iterator<Item = u64>, test: impl Fn(&[usize]) -> bool) -> Option<u64> {
        let mut found = None;
        let mut word = Vec::with_capacity(self.cfg.block_len);
        for m in candidates {
            book.word_into(m, &mut word);
            if test(&word) {
                if found.is_some() {
                    return None;
                }
                found = Some(m);
            }
        }
        found
    }

    fn run_trial(&self, trial: u64) -> TrialOutcome {
        let cfg = self.cfg;
        let b = self.bits;
        let n = cfg.n;
        let nn = cfg.block_len;
        let mut rng = keyed_rng(cfg.seed, b"wtfb-trial", &[trial]);
        let mut blocks: Vec<Block> = Vec::with_capacity(n);
        let mut keys = Vec::with_capacity(n.saturating_sub(2));
        let mut cover_failures = 0;
        let mut w_star_prev = 0u64;
        let mut key = 0u64;

        for i in 1..=n {
            let block_id = i as u64;
            let carries = i < n;
            // ensemble codewords do not depend on the indices, only the keyed part is drawn
            let w1 = if carries && self.explicit { rng.gen_range(0..pow2(b.b1)) } else { 0 };
            let w2 = if carries && i > 1 { rng.gen_range(0..pow2(b.b2)) } else { 0 };
            let wp = if carries && self.explicit { rng.gen_range(0..pow2(b.b_prime)) } else { 0 };
            let k = if carries && i > 1 { key } else { 0 };
            if carries && i > 1 {
                keys.push((k, w2));
            }
            let u_index = if self.explicit { self.pack(w1, w2 ^ k, wp, w_star_prev) } else { 0 };
            let u = if self.explicit {
                Codebook::new(cfg.seed, trial, block_id, U_BOOK, &self.pu, nn).word(u_index)
            } else {
                (0..nn).map(|_| draw(&mut rng, &self.pu)).collect()
            };
            let mut y1 = Vec::with_capacity(nn);
            for &ut in &u {
                let x = draw(&mut rng, &self.px_u[ut * self.nx..(ut + 1) * self.nx]);
                let row = &self.law[x * self.ny1 * self.ny2..(x + 1) * self.ny1 * self.ny2];
                y1.push(draw(&mut rng, row) / self.ny2);
            }
            let (v, v_index) = if carries {
                let (v, v_index, ok) = self.quantize(&mut rng, trial, block_id, &u, &y1);
                cover_failures += usize::from(!ok);
                w_star_prev = if self.explicit { v_index >> (b.b_tilde - b.b_star) } else { 0 };
                key = self.coloring.key(i, &y1);
                (v, v_index)
            } else {
                (Vec::new(), 0)
            };
            blocks.push(Block { u, y1, v, u_index, v_index });
        }

        let errors = if self.explicit {
            self.decode_explicit(trial, &blocks)
        } else {
            self.decode_ensemble(&blocks)
        };
        TrialOutcome { errors, cover_failures, keys }
    }

    /// Returns `(v, index, covered)`.
    fn quantize(
        &self,
        rng: &mut ChaCha8Rng,
        trial: u64,
        block: u64,
        u: &[usize],
        y1: &[usize],
    ) -> (Vec<usize>, u64, bool) {
        let nn = self.cfg.block_len;
        if self.explicit {
            let m = pow2(self.bits.b_tilde);
            let book = Codebook::new(self.cfg.seed, trial, block, V_BOOK, &self.pv, nn);
            let mut word = Vec::with_capacity(nn);
            for idx in 0..m {
                book.word_into(idx, &mut word);
                if self.typical_v_cover(u, y1, &word) {
                    return (word, idx, true);
                }
            }
            let idx = rng.gen_range(0..m);
            return (book.word(idx), idx, false);
        }
        let counts = self.side_counts(|t| u[t] * self.ny1 + y1[t], self.nu * self.ny1);
        let q = competitor_probability(&self.t_v_uy1, &self.pv, &counts, &self.lnf);
        let covered = rng.gen::<f64>() < any_of(q, count2(self.bits.b_tilde));
        if !covered {
            let v = (0..nn).map(|_| draw(rng, &self.pv)).collect();
            return (v, 0, false);
        }
        let mut v = Vec::with_capacity(nn);
        for _ in 0..COVER_DRAWS {
            v.clear();
            for t in 0..nn {
                let row = (u[t] * self.ny1 + y1[t]) * self.nv;
                v.push(draw(rng, &self.pv_uy1[row..row + self.nv]));
            }
            if self.typical_v_cover(u, y1, &v) {
                break;
            }
        }
        (v, 0, true)
    }

    fn u_candidates(&self, block: usize) -> Box<dyn Iterator<Item = u64> + '_> {
        let b = self.bits;
        if block == 1 {
            let (b1, bp) = (b.b1, b.b_prime);
            Box::new((0..pow2(b1 + bp)).map(move |m| self.pack(m >> bp, 0, m & (pow2(bp) - 1), 0)))
        } else {
            Box::new(0..pow2(b.u_bits()))
        }
    }

    fn u_candidate_count(&self, block: usize) -> f64 {
        if block == 1 {
            count2(self.bits.b1 + self.bits.b_prime)
        } else {
            count2(self.bits.u_bits())
        }
    }

    fn decode_explicit(&self, trial: u64, blocks: &[Block]) -> f64 {
        let cfg = self.cfg;
        let (n, nn) = (cfg.n, cfg.block_len);
        let b = self.bits;
        let last = &blocks[n - 1];
        let mut ok = if b.b_star == 0 {
            true
        } else {
            let book = Codebook::new(cfg.seed, trial, n as u64, U_BOOK, &self.pu, nn);
            let found = self.unique(&book, (0..pow2(b.b_star)).map(|w| self.pack(0, 0, 0, w)), |u| {
                self.t_u_y1.check_with(|t| last.y1[t] * self.nu + u[t])
            });
            found == Some(last.u_index)
        };
        let mut errors = 0.0;
        for i in (1..n).rev() {
            let blk = &blocks[i - 1];
            if ok && b.b_tilde > b.b_star {
                let shift = b.b_tilde - b.b_star;
                let bin = blk.v_index >> shift;
                let book = Codebook::new(cfg.seed, trial, i as u64, V_BOOK, &self.pv, nn);
                let found = self.unique(&book, (0..pow2(shift)).map(|j| bin << shift | j), |v| {
                    self.t_v_y1.check_with(|t| blk.y1[t] * self.nv + v[t])
                });
                ok = found == Some(blk.v_index);
            }
            if ok && self.u_candidate_count(i) > 1.0 {
                let book = Codebook::new(cfg.seed, trial, i as u64, U_BOOK, &self.pu, nn);
                let found = self.unique(&book, self.u_candidates(i), |u| self.typical_u(u, &blk.y1, &blk.v));
                ok = found == Some(blk.u_index);
            }
            if !ok {
                errors += 1.0;
            }
        }
        errors
    }

    /// Expected number of block errors over the competitors, given the
    /// realized transmitted sequences.
    fn decode_ensemble(&self, blocks: &[Block]) -> f64 {
        let n = self.cfg.n;
        let b = self.bits;
        let last = &blocks[n - 1];
        let mut p_ok = 1.0;
        if b.b_star > 0 {
            p_ok *= self.step_ok(
                self.t_u_y1.check_with(|t| last.y1[t] * self.nu + last.u[t]),
                &self.t_u_y1,
                &self.pu,
                &self.side_counts(|t| last.y1[t], self.ny1),
                count2(b.b_star),
            );
        }
        let mut errors = 0.0;
        for i in (1..n).rev() {
            let blk = &blocks[i - 1];
            if b.b_tilde > b.b_star {
                p_ok *= self.step_ok(
                    self.t_v_y1.check_with(|t| blk.y1[t] * self.nv + blk.v[t]),
                    &self.t_v_y1,
                    &self.pv,
                    &self.side_counts(|t| blk.y1[t], self.ny1),
                    count2(b.b_tilde - b.b_star),
                );
            }
            let m = self.u_candidate_count(i);
            if m > 1.0 {
                p_ok *= self.step_ok(
                    self.typical_u(&blk.u, &blk.y1, &blk.v),
                    &self.t_u_y1v,
                    &self.pu,
                    &self.side_counts(|t| blk.y1[t] * self.nv + blk.v[t], self.ny1 * self.nv),
                    m,
                );
            }
            errors += 1.0 - p_ok;
        }
        errors
    }

    /// Probability that the true candidate is the unique typical one among `m`.
    fn step_ok(&self, true_typical: bool, table: &TypicalTable, law: &[f64], counts: &[usize], m: f64) -> f64 {
        if !true_typical {
            return 0.0;
        }
        let q = competitor_probability(table, law, counts, &self.lnf);
        1.0 - any_of(q, m - 1.0)
    }

    fn run(&self, mode: SimMode) -> SimReport {
        let cfg = self.cfg;
        let outcomes: Vec<TrialOutcome> = (0..cfg.trials as u64).into_par_iter().map(|t| self.run_trial(t)).collect();
        let message_blocks = (cfg.trials * (cfg.n - 1)) as f64;
        let errors: f64 = outcomes.iter().map(|o| o.errors).sum();
        let failures: usize = outcomes.iter().map(|o| o.cover_failures).sum();
        let pairs: Vec<(u64, u64)> = outcomes.iter().flat_map(|o| o.keys.iter().copied()).collect();
        let hist_bits = self.coloring.key_bits().min(KEY_HISTOGRAM_BITS);
        let mut hist = vec![0u64; 1usize << hist_bits];
        for &(k, _) in &pairs {
            hist[(k & ((1u64 << hist_bits) - 1)) as usize] += 1;
        }
        let (_, p_value) = chi_square_uniformity(&hist);
        SimReport {
            mode,
            config: cfg.clone(),
            bits: self.bits,
            codebook_mode: if self.explicit { CodebookMode::Explicit } else { CodebookMode::Ensemble },
            decode_error_rate: errors / message_blocks,
            encoder_failure_rate: failures as f64 / message_blocks,
            measured_equivocation_rate: None,
            exact_small: None,
            key_histogram: hist,
            key_chi_square_p_value: p_value,
            key_message_mutual_information: empirical_mutual_information(&pairs),
        }
    }
}

/// `(n-1)/n (R1 + R' + R*) + (n-2)/n R2 - I(Y2;U) + (n-2)/n H(Y1|Y2,U)`,
/// clipped to `[0, ((n-1) R1 + (n-2) R2) / n]` since the equivocation cannot
/// exceed the message entropy.
pub(crate) fn equivocation_lower_bound(cfg: &SimConfig, info: &AuxInfo) -> f64 {
    let n = cfg.n as f64;
    let r = &cfg.rates;
    let message_rate = ((n - 1.0) * r.r1 + (n - 2.0) * r.r2) / n;
    let bound = (n - 1.0) / n * (r.r1 + r.r_prime + r.r_star) + (n - 2.0) / n * r.r2 - info.i_y2_u
        + (n - 2.0) / n * info.h_y1_given_y2u;
    bound.clamp(0.0, message_rate)
}

/// Point-to-point channel `P(y|x)` with feedback: `U = X` drawn from `px`,
/// quantizer `P(v|x,y)`, rates `r1`, `r_star`, `r_tilde`.
pub fn run_dmc_feedback_sim(
    channel: &ConditionalPmf,
    px: &Pmf,
    quantizer: &ConditionalPmf,
    cfg: &SimConfig,
) -> Result<SimReport, SimError> {
    cfg.validate()?;
    if cfg.rates.r2 != 0.0 || cfg.rates.r_prime != 0.0 {
        return Err(SimError::Config("the point-to-point scheme has no r2 or r_prime".into()));
    }
    let [nx] = channel.input_sizes() else {
        return Err(SimError::Config("P(y|x) must have a single input".into()));
    };
    let ch = WiretapChannel::new(*nx, channel.output_size(), 1, channel.clone(), None)
        .map_err(|e| SimError::Config(e.to_string()))?;
    let aux = AuxiliarySystem::new(*nx, channel.output_size(), px.clone(), ConditionalPmf::identity(*nx)?, quantizer.clone())?;
    let coloring = KeyColoring::new(0, cfg.block_len, 0.0, cfg.seed)?;
    Ok(Scheme::new(&ch, &aux, cfg, coloring)?.run(SimMode::Dmc))
}

/// The secrecy scheme on `ch` with auxiliary system `aux`. Rates outside the
/// region are rejected with every violated constraint listed.
pub fn run_wiretap_feedback_sim(
    ch: &WiretapChannel,
    aux: &AuxiliarySystem,
    cfg: &SimConfig,
) -> Result<SimReport, SimError> {
    cfg.validate()?;
    let region = rate_region_check(ch, aux, &cfg.rates)?;
    if !region.feasible() {
        return Err(SimError::Infeasible { violated: region.violated(), report: Box::new(region) });
    }
    let info = region.info;
    let bits = BlockBits::new(&cfg.rates, cfg.block_len);
    let coloring = KeyColoring::new(bits.b2, cfg.block_len, info.h_y1_given_y2u, cfg.seed)?;
    let mut report = Scheme::new(ch, aux, cfg, coloring)?.run(SimMode::Wiretap);
    report.measured_equivocation_rate = Some(equivocation_lower_bound(cfg, &info));
    if cfg.n == 3 && cfg.block_len <= EXACT_MAX_BLOCK_LEN {
        report.exact_small = Some(exact_small_equivocation(ch, aux, cfg)?);
    }
    Ok(report)
}
