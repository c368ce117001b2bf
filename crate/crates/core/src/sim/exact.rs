//! Exact wiretapper equivocation of a three-block run on tiny blocks.
//!
//! For a fixed pair of codebooks the law of `(W, Y2^{3N})` is summed out over
//! every `y1` block, every filler index `w'` and the quantizer choice, with
//! `W` the messages `w1` of blocks 1 and 2 and `w2` of block 2. The result is
//! `H(W | Y2^{3N}) / 3N`, averaged over a few independently drawn codebooks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codebook::{Codebook, U_BOOK, V_BOOK};
use super::coloring::KeyColoring;
use super::typical::TypicalTable;
use super::{BlockBits, SimConfig, SimError};
use crate::bounds::AuxiliarySystem;
use crate::channel::WiretapChannel;
use crate::info::axis;

/// Longest block the enumeration accepts.
pub const EXACT_MAX_BLOCK_LEN: usize = 8;
/// Codebooks averaged over, capped by the trial count.
const EXACT_CODEBOOKS: usize = 4;
const MAX_Y2_TUPLES: f64 = (1u64 << 24) as f64;
const MAX_BLOCK_PAIRS: f64 = (1u64 << 20) as f64;
const MAX_INDEX_BITS: u32 = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSmall {
    /// Mean of `H(W | Y2) / 3N` over the codebooks, bits per symbol.
    pub equivocation_rate: f64,
    /// Message bits per symbol: `(2 b1 + b2) / 3N`.
    pub configured_secrecy_rate: f64,
    pub message_bits: u32,
    pub per_codebook: Vec<f64>,
}

struct Words {
    len: usize,
    base: usize,
}

impl Words {
    fn count(&self) -> usize {
        self.base.pow(self.len as u32)
    }

    fn word(&self, mut m: usize, out: &mut Vec<usize>) {
        out.clear();
        for _ in 0..self.len {
            out.push(m % self.base);
            m /= self.base;
        }
    }
}

struct Enumerator<'a> {
    cfg: &'a SimConfig,
    bits: BlockBits,
    nu: usize,
    ny1: usize,
    ny2: usize,
    /// `W(y1, y2 | u)` flattened `u * ny1 * ny2 + y1 * ny2 + y2`
    composite: Vec<f64>,
    pu: Vec<f64>,
    pv: Vec<f64>,
    cover: TypicalTable,
    coloring: KeyColoring,
    y1_words: Vec<Vec<usize>>,
    y2_words: Vec<Vec<usize>>,
}

impl Enumerator<'_> {
    fn pack(&self, w1: usize, c: usize, wp: usize, ws: usize) -> u64 {
        let b = &self.bits;
        ((((w1 << b.b2 | c) << b.b_prime | wp) << b.b_star) | ws) as u64
    }

    /// `W^N(y1, y2 | u)` for every `(y1, y2)` block pair, `y1` major.
    fn block_law(&self, u: &[usize]) -> Vec<f64> {
        let (n1, n2) = (self.y1_words.len(), self.y2_words.len());
        let stride = self.ny1 * self.ny2;
        let mut out = vec![0.0; n1 * n2];
        for (a, y1) in self.y1_words.iter().enumerate() {
            for (b, y2) in self.y2_words.iter().enumerate() {
                out[a * n2 + b] =
                    (0..u.len()).map(|t| self.composite[u[t] * stride + y1[t] * self.ny2 + y2[t]]).product();
            }
        }
        out
    }

    /// `P(w* | u, y1)` for each `y1` block.
    fn bin_law(&self, vbook: &[Vec<usize>], u: &[usize]) -> Vec<Vec<f64>> {
        let b = self.bits;
        let bins = 1usize << b.b_star;
        let shift = b.b_tilde - b.b_star;
        self.y1_words
            .iter()
            .map(|y1| {
                let hit = vbook.iter().position(|v| {
                    self.cover.check_with(|t| (u[t] * self.ny1 + y1[t]) * self.pv.len() + v[t])
                });
                match hit {
                    Some(idx) => {
                        let mut d = vec![0.0; bins];
                        d[idx >> shift] = 1.0;
                        d
                    }
                    // failed covering picks a uniform index, hence a uniform bin
                    None => vec![1.0 / bins as f64; bins],
                }
            })
            .collect()
    }

    fn equivocation(&self, book: u64) -> f64 {
        let cfg = self.cfg;
        let b = self.bits;
        let nn = cfg.block_len;
        let seed = cfg.seed;
        let (n2, bins, keys) = (self.y2_words.len(), 1usize << b.b_star, 1usize << b.b2);
        let (m1, mp) = (1usize << b.b1, 1usize << b.b_prime);
        let pwp = 1.0 / mp as f64;
        let vbook = |block: u64| -> Vec<Vec<usize>> {
            let cb = Codebook::new(seed, book, block, V_BOOK, &self.pv, nn);
            (0..1u64 << b.b_tilde).map(|i| cb.word(i)).collect()
        };
        let (v1, v2) = (vbook(1), vbook(2));
        let ub = |block: u64| Codebook::new(seed, book, block, U_BOOK, &self.pu, nn);
        let (u1, u2, u3) = (ub(1), ub(2), ub(3));

        // c1[w1][y2][k][ws] = 2^-b' sum over w', y1 with key k
        let mut c1 = vec![0.0; m1 * n2 * keys * bins];
        for w1 in 0..m1 {
            for wp in 0..mp {
                let u = u1.word(self.pack(w1, 0, wp, 0));
                let law = self.block_law(&u);
                let bl = self.bin_law(&v1, &u);
                for (a, y1) in self.y1_words.iter().enumerate() {
                    let k = self.coloring.key(1, y1) as usize;
                    for y2 in 0..n2 {
                        let p = law[a * n2 + y2] * pwp;
                        if p == 0.0 {
                            continue;
                        }
                        let base = ((w1 * n2 + y2) * keys + k) * bins;
                        for (ws, &q) in bl[a].iter().enumerate() {
                            c1[base + ws] += p * q;
                        }
                    }
                }
            }
        }

        // c3[ws][y2]; without a bin index block 3 is independent of W
        let n3 = if b.b_star == 0 { 1 } else { n2 };
        let mut c3 = vec![1.0; bins * n3];
        if b.b_star > 0 {
            for ws in 0..bins {
                let law = self.block_law(&u3.word(self.pack(0, 0, 0, ws)));
                for y2 in 0..n2 {
                    c3[ws * n2 + y2] = (0..self.y1_words.len()).map(|a| law[a * n2 + y2]).sum();
                }
            }
        }

        // d[w1][c][ws1][y2][y3] = 2^-b' sum over w', y1 and the next bin
        let mut d = vec![0.0; m1 * keys * bins * n2 * n3];
        for w1 in 0..m1 {
            for c in 0..keys {
                for ws1 in 0..bins {
                    let base = ((w1 * keys + c) * bins + ws1) * n2 * n3;
                    for wp in 0..mp {
                        let u = u2.word(self.pack(w1, c, wp, ws1));
                        let law = self.block_law(&u);
                        let bl = if b.b_star > 0 { self.bin_law(&v2, &u) } else { Vec::new() };
                        for a in 0..self.y1_words.len() {
                            for y2 in 0..n2 {
                                let p = law[a * n2 + y2] * pwp;
                                if p == 0.0 {
                                    continue;
                                }
                                if b.b_star == 0 {
                                    d[base + y2] += p;
                                    continue;
                                }
                                for (ws2, &q) in bl[a].iter().enumerate() {
                                    if q == 0.0 {
                                        continue;
                                    }
                                    for y3 in 0..n3 {
                                        d[base + y2 * n3 + y3] += p * q * c3[ws2 * n3 + y3];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        let msgs = m1 * m1 * keys;
        let pw = 1.0 / msgs as f64;
        let (h_joint, h_y2) = (0..n2)
            .into_par_iter()
            .map(|y1b| {
                let mut hj = 0.0;
                let mut hy = 0.0;
                let mut row = vec![0.0; msgs];
                for y23 in 0..n2 * n3 {
                    let mut total = 0.0;
                    for w1a in 0..m1 {
                        let a = &c1[(w1a * n2 + y1b) * keys * bins..][..keys * bins];
                        for w1b in 0..m1 {
                            for w2 in 0..keys {
                                let mut p = 0.0;
                                for k in 0..keys {
                                    for ws in 0..bins {
                                        let q = a[k * bins + ws];
                                        if q != 0.0 {
                                            p += q * d[((w1b * keys + (w2 ^ k)) * bins + ws) * n2 * n3 + y23];
                                        }
                                    }
                                }
                                p *= pw;
                                row[(w1a * m1 + w1b) * keys + w2] = p;
                                total += p;
                            }
                        }
                    }
                    hj += row.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum::<f64>();
                    if total > 0.0 {
                        hy -= total * total.log2();
                    }
                }
                (hj, hy)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        ((h_joint - h_y2) / (3 * nn) as f64).max(0.0)
    }
}

/// Exact equivocation of the three-block scheme with the configuration's
/// rates. Requires `n = 3` and `N <= EXACT_MAX_BLOCK_LEN`.
pub fn exact_small_equivocation(
    ch: &WiretapChannel,
    aux: &AuxiliarySystem,
    cfg: &SimConfig,
) -> Result<ExactSmall, SimError> {
    cfg.validate()?;
    if cfg.n != 3 || cfg.block_len > EXACT_MAX_BLOCK_LEN {
        return Err(SimError::Config(format!(
            "exact equivocation needs n = 3 and N <= {EXACT_MAX_BLOCK_LEN}, got n = {}, N = {}",
            cfg.n, cfg.block_len
        )));
    }
    let bits = BlockBits::new(&cfg.rates, cfg.block_len);
    let nn = cfg.block_len;
    let (nu, nx, ny1, ny2) = (aux.u_size, ch.x_size(), ch.y1_size(), ch.y2_size());
    let y1n = (ny1 as f64).powi(nn as i32);
    let y2n = (ny2 as f64).powi(nn as i32);
    if y2n.powi(3) > MAX_Y2_TUPLES || y1n * y2n > MAX_BLOCK_PAIRS {
        return Err(SimError::Config("output alphabets too large for exact enumeration".into()));
    }
    if bits.u_bits().max(bits.b_tilde) > MAX_INDEX_BITS {
        return Err(SimError::Config(format!("exact enumeration caps codebook indices at {MAX_INDEX_BITS} bits")));
    }
    let info = aux.info(ch)?;
    let coloring = KeyColoring::new(bits.b2, nn, info.h_y1_given_y2u, cfg.seed)?;
    let j = aux.joint(ch)?;
    let law = ch.law().table();
    let stride = ny1 * ny2;
    let mut composite = vec![0.0; nu * stride];
    for u in 0..nu {
        for x in 0..nx {
            let pxu = aux.px_given_u.table()[u * nx + x];
            for c in 0..stride {
                composite[u * stride + c] += pxu * law[x * stride + c];
            }
        }
    }
    let words = |base: usize| {
        let w = Words { len: nn, base };
        let mut out = Vec::with_capacity(w.count());
        for m in 0..w.count() {
            let mut v = Vec::new();
            w.word(m, &mut v);
            out.push(v);
        }
        out
    };
    let e = Enumerator {
        cfg,
        bits,
        nu,
        ny1,
        ny2,
        composite,
        pu: aux.pu.probs().to_vec(),
        pv: j.marginal_table(&[axis::V]).1,
        cover: TypicalTable::new(j.marginal_table(&[axis::U, axis::Y1, axis::V]).1, cfg.epsilon, nn),
        coloring,
        y1_words: words(ny1),
        y2_words: words(ny2),
    };
    debug_assert!(e.nu == aux.u_size);
    let books = cfg.trials.min(EXACT_CODEBOOKS) as u64;
    let per_codebook: Vec<f64> = (0..books).map(|c| e.equivocation(c)).collect();
    let message_bits = 2 * bits.b1 + bits.b2;
    Ok(ExactSmall {
        equivocation_rate: per_codebook.iter().sum::<f64>() / per_codebook.len() as f64,
        configured_secrecy_rate: message_bits as f64 / (3 * nn) as f64,
        message_bits,
        per_codebook,
    })
}
