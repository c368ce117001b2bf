//! Source coding with decoder side information: quantize `x` to a codeword,
//! send its bin, and let the decoder pick the bin member typical with `y`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codebook::{draw, keyed_rng, Codebook, U_BOOK};
use super::typical::{any_of, competitor_probability, ln_factorials, TypicalTable};
use super::{BlockBits, CodebookMode, SimConfig, SimError, SimMode, SimReport};
use crate::info::{ConditionalPmf, JointPmf};

/// Searches over more than `2^WZ_EXPLICIT_BITS` codewords use the ensemble form.
const WZ_EXPLICIT_BITS: u32 = 14;
const COVER_DRAWS: usize = 1000;

/// Bin rate `r` and in-bin rate `r_star`, bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WzRates {
    pub r: f64,
    pub r_star: f64,
}

/// One encode/decode round on a block of `block_len` source pairs. Returns
/// whether the decoded codeword is jointly typical with the source pair.
pub fn wz_encode_decode_trial(
    source: &JointPmf,
    quantizer: &ConditionalPmf,
    rates: WzRates,
    block_len: usize,
    epsilon: f64,
    seed: u64,
) -> Result<bool, SimError> {
    let &[nx, ny] = source.sizes() else {
        return Err(SimError::Config("the source law must be over (x, y)".into()));
    };
    if quantizer.input_sizes() != [nx] {
        return Err(SimError::Config("the quantizer must map x to u".into()));
    }
    if block_len == 0 || !(epsilon > 0.0) {
        return Err(SimError::Config("N must be positive and epsilon positive".into()));
    }
    for r in [rates.r, rates.r_star] {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(SimError::Config(format!("rate {r} must be a nonnegative number")));
        }
    }
    let nu = quantizer.output_size();
    let f = |r: f64| (block_len as f64 * r + 1e-9).floor() as u32;
    let (b_bin, b_star) = (f(rates.r), f(rates.r_star));
    let total = b_bin + b_star;

    // p[x][y][u]
    let qt = quantizer.table();
    let mut xyu = vec![0.0; nx * ny * nu];
    for x in 0..nx {
        for y in 0..ny {
            for u in 0..nu {
                xyu[(x * ny + y) * nu + u] = source.probs()[x * ny + y] * qt[x * nu + u];
            }
        }
    }
    let marg = |keep_x: bool, keep_y: bool| {
        let mut out = vec![0.0; if keep_x { nx } else { 1 } * if keep_y { ny } else { 1 } * nu];
        for x in 0..nx {
            for y in 0..ny {
                let side = if keep_x { x } else { 0 } * if keep_y { ny } else { 1 } + if keep_y { y } else { 0 };
                for u in 0..nu {
                    out[side * nu + u] += xyu[(x * ny + y) * nu + u];
                }
            }
        }
        out
    };
    let pu = marg(false, false);
    let t_xu = TypicalTable::new(marg(true, false), epsilon, block_len);
    let t_yu = TypicalTable::new(marg(false, true), epsilon, block_len);
    let t_xyu = TypicalTable::new(xyu.clone(), epsilon, block_len);

    let mut rng = keyed_rng(seed, b"wtfb-wz", &[]);
    let mut x = Vec::with_capacity(block_len);
    let mut y = Vec::with_capacity(block_len);
    for _ in 0..block_len {
        let c = draw(&mut rng, source.probs());
        x.push(c / ny);
        y.push(c % ny);
    }
    let count = |s: &[usize], n: usize| {
        let mut c = vec![0usize; n];
        s.iter().for_each(|&v| c[v] += 1);
        c
    };

    let decoded = if total <= WZ_EXPLICIT_BITS {
        let book = Codebook::new(seed, 0, 0, U_BOOK, &pu, block_len);
        let mut word = Vec::with_capacity(block_len);
        let mut chosen = None;
        for m in 0..1u64 << total {
            book.word_into(m, &mut word);
            if t_xu.check_with(|t| x[t] * nu + word[t]) {
                chosen = Some(m);
                break;
            }
        }
        let Some(m) = chosen else { return Ok(false) };
        let bin = m >> b_star;
        let mut found = None;
        for j in 0..1u64 << b_star {
            let cand = bin << b_star | j;
            book.word_into(cand, &mut word);
            if t_yu.check_with(|t| y[t] * nu + word[t]) {
                if found.is_some() {
                    return Ok(false);
                }
                found = Some(cand);
            }
        }
        match found {
            Some(c) if c == m => book.word(m),
            _ => return Ok(false),
        }
    } else {
        let lnf = ln_factorials(block_len);
        let q_cover = competitor_probability(&t_xu, &pu, &count(&x, nx), &lnf);
        if rng.gen::<f64>() >= any_of(q_cover, (total as f64).exp2()) {
            return Ok(false);
        }
        let mut u = Vec::with_capacity(block_len);
        for _ in 0..COVER_DRAWS {
            u.clear();
            u.extend(x.iter().map(|&xt| draw(&mut rng, &qt[xt * nu..(xt + 1) * nu])));
            if t_xu.check_with(|t| x[t] * nu + u[t]) {
                break;
            }
        }
        if !t_yu.check_with(|t| y[t] * nu + u[t]) {
            return Ok(false);
        }
        let q_dec = competitor_probability(&t_yu, &pu, &count(&y, ny), &lnf);
        if rng.gen::<f64>() < any_of(q_dec, (b_star as f64).exp2() - 1.0) {
            return Ok(false);
        }
        u
    };
    Ok(t_xyu.check_with(|t| (x[t] * ny + y[t]) * nu + decoded[t]))
}

/// `trials` independent rounds with bin rate `rates.r1` and in-bin rate
/// `rates.r_star`; the other rates are unused. `decode_error_rate` is the
/// fraction of failed rounds.
pub fn run_wz_sim(source: &JointPmf, quantizer: &ConditionalPmf, cfg: &SimConfig) -> Result<SimReport, SimError> {
    cfg.validate()?;
    let rates = WzRates { r: cfg.rates.r1, r_star: cfg.rates.r_star };
    let outcomes = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = keyed_rng(cfg.seed, b"wtfb-wz-trial", &[t]).gen::<u64>();
            wz_encode_decode_trial(source, quantizer, rates, cfg.block_len, cfg.epsilon, seed)
        })
        .collect::<Result<Vec<bool>, _>>()?;
    let failures = outcomes.iter().filter(|&&ok| !ok).count();
    let bits = BlockBits::new(&cfg.rates, cfg.block_len);
    Ok(SimReport {
        mode: SimMode::Wynerziv,
        config: cfg.clone(),
        bits,
        codebook_mode: if bits.b1 + bits.b_star <= WZ_EXPLICIT_BITS {
            CodebookMode::Explicit
        } else {
            CodebookMode::Ensemble
        },
        decode_error_rate: failures as f64 / cfg.trials as f64,
        encoder_failure_rate: 0.0,
        measured_equivocation_rate: None,
        exact_small: None,
        key_histogram: Vec::new(),
        key_chi_square_p_value: 1.0,
        key_message_mutual_information: 0.0,
    })
}
