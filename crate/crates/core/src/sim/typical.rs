//! Strong typicality on empirical counts, and the exact probability that an
//! independent i.i.d. codeword is jointly typical with a fixed sequence.
//!
//! A tuple sequence is typical for a law `P` when every cell frequency is
//! within `epsilon` of `P` and no zero-probability cell occurs.

use super::SimError;
use crate::info::{JointPmf, Pmf};

fn cell_ok(count: usize, n: usize, p: f64, eps: f64) -> bool {
    if p == 0.0 {
        count == 0
    } else {
        (count as f64 / n as f64 - p).abs() <= eps
    }
}

fn counts_ok(counts: &[usize], n: usize, law: &[f64], eps: f64) -> bool {
    counts.iter().zip(law).all(|(&c, &p)| cell_ok(c, n, p, eps))
}

/// `|pi(a)/N - P(a)| <= epsilon` for every symbol `a`.
pub fn typical_set_test(seq: &[usize], reference: &Pmf, epsilon: f64) -> Result<bool, SimError> {
    if seq.is_empty() {
        return Err(SimError::Config("typicality needs a nonempty sequence".into()));
    }
    let mut counts = vec![0usize; reference.len()];
    for &s in seq {
        *counts.get_mut(s).ok_or(SimError::Alphabet { symbol: s, size: reference.len() })? += 1;
    }
    Ok(counts_ok(&counts, seq.len(), reference.probs(), epsilon))
}

/// Joint version: `seqs[k]` is the sequence of axis `k` of `reference`.
pub fn jointly_typical(seqs: &[&[usize]], reference: &JointPmf, epsilon: f64) -> Result<bool, SimError> {
    let sizes = reference.sizes();
    if seqs.len() != sizes.len() || seqs.is_empty() {
        return Err(SimError::Config(format!("{} sequences for a {}-axis law", seqs.len(), sizes.len())));
    }
    let n = seqs[0].len();
    if n == 0 || seqs.iter().any(|s| s.len() != n) {
        return Err(SimError::Config("sequences must share a nonzero length".into()));
    }
    for (s, &size) in seqs.iter().zip(sizes) {
        if let Some(&bad) = s.iter().find(|&&v| v >= size) {
            return Err(SimError::Alphabet { symbol: bad, size });
        }
    }
    let table = TypicalTable::new(reference.probs().to_vec(), epsilon, n);
    Ok(table.check_with(|t| seqs.iter().zip(sizes).fold(0, |acc, (s, &size)| acc * size + s[t])))
}

/// A flattened law with precomputed per-cell count windows for length `n`.
#[derive(Debug, Clone)]
pub(crate) struct TypicalTable {
    pub law: Vec<f64>,
    pub eps: f64,
    pub n: usize,
}

impl TypicalTable {
    pub fn new(law: Vec<f64>, eps: f64, n: usize) -> Self {
        Self { law, eps, n }
    }

    /// Typicality of the sequence whose `t`-th flattened cell is `cell(t)`.
    pub fn check_with(&self, cell: impl Fn(usize) -> usize) -> bool {
        let mut counts = vec![0usize; self.law.len()];
        for t in 0..self.n {
            counts[cell(t)] += 1;
        }
        counts_ok(&counts, self.n, &self.law, self.eps)
    }

    /// Admissible counts `[lo, hi]` of a cell with probability `p`, if any.
    fn window(&self, p: f64) -> Option<(usize, usize)> {
        if p == 0.0 {
            return Some((0, 0));
        }
        let n = self.n as f64;
        // small slack so that boundary counts are not lost to rounding
        let lo = ((p - self.eps) * n - 1e-9).ceil().max(0.0);
        let hi = ((p + self.eps) * n + 1e-9).floor().min(n);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }
}

/// Natural-log factorials `ln k!` for `k <= n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for k in 1..=n {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Probability that a codeword drawn i.i.d. from `pc` is jointly typical with
/// a fixed side sequence, for the joint law `table` flattened as
/// `side * |C| + c`. `side_counts[s]` is the number of positions with side
/// symbol `s`.
///
/// The codeword symbols in the positions of each side symbol form an
/// independent multinomial, so the probability factors over side symbols and
/// each factor is a sum over the count box, done by a convolution per codeword
/// symbol in log space.
pub(crate) fn competitor_probability(table: &TypicalTable, pc: &[f64], side_counts: &[usize], lnf: &[f64]) -> f64 {
    let nc = pc.len();
    debug_assert_eq!(table.law.len(), side_counts.len() * nc);
    let mut log_q = 0.0;
    for (s, &ns) in side_counts.iter().enumerate() {
        let mut windows = Vec::with_capacity(nc);
        for c in 0..nc {
            match table.window(table.law[s * nc + c]) {
                Some(w) => windows.push(w),
                None => return 0.0,
            }
        }
        if ns == 0 {
            if windows.iter().any(|&(lo, _)| lo > 0) {
                return 0.0;
            }
            continue;
        }
        // f[m] = ln sum over counts of the first symbols totalling m
        let mut f = vec![f64::NEG_INFINITY; ns + 1];
        f[0] = 0.0;
        for (c, &(lo, hi)) in windows.iter().enumerate() {
            let lp = pc[c].ln();
            let mut g = vec![f64::NEG_INFINITY; ns + 1];
            for m in 0..=ns {
                if f[m] == f64::NEG_INFINITY {
                    continue;
                }
                let top = hi.min(ns - m);
                for k in lo..=top {
                    let term = if k == 0 {
                        0.0
                    } else if pc[c] == 0.0 {
                        break;
                    } else {
                        k as f64 * lp - lnf[k]
                    };
                    g[m + k] = log_add(g[m + k], f[m] + term);
                }
            }
            f = g;
        }
        let lf = f[ns];
        if lf == f64::NEG_INFINITY {
            return 0.0;
        }
        log_q += lnf[ns] + lf;
    }
    log_q.exp().min(1.0)
}

/// `1 - (1 - q)^m` without cancellation for tiny `q`.
pub(crate) fn any_of(q: f64, m: f64) -> f64 {
    if q <= 0.0 || m <= 0.0 {
        0.0
    } else if q >= 1.0 {
        1.0
    } else {
        -(m * (-q).ln_1p()).exp_m1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_frequencies_are_typical() {
        let p = Pmf::new(vec![0.25, 0.75]).unwrap();
        assert!(typical_set_test(&[0, 1, 1, 1], &p, 1e-12).unwrap());
    }

    #[test]
    fn constant_sequence_is_not_typical() {
        let p = Pmf::uniform(2).unwrap();
        assert!(!typical_set_test(&[0; 20], &p, 0.1).unwrap());
    }

    #[test]
    fn alphabet_mismatch() {
        let p = Pmf::uniform(2).unwrap();
        assert!(matches!(typical_set_test(&[0, 2], &p, 0.1), Err(SimError::Alphabet { .. })));
    }

    #[test]
    fn zero_probability_symbols_are_forbidden() {
        let p = Pmf::new(vec![0.0, 1.0]).unwrap();
        assert!(!typical_set_test(&[1; 99].iter().copied().chain([0]).collect::<Vec<_>>(), &p, 0.5).unwrap());
    }

    #[test]
    fn bernoulli_draws_typical_with_high_probability() {
        // P(|Bin(1000, 0.3)/1000 - 0.3| > 0.05) is about 6e-4
        let p = Pmf::new(vec![0.7, 0.3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let hits = (0..1000)
            .filter(|_| {
                let seq: Vec<usize> = (0..1000).map(|_| usize::from(rng.gen::<f64>() < 0.3)).collect();
                typical_set_test(&seq, &p, 0.05).unwrap()
            })
            .count();
        assert!(hits >= 990, "{hits}");
    }

    #[test]
    fn joint_test_matches_flattened_counts() {
        let j = JointPmf::new(vec![2, 2], vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let a = [0, 0, 0, 0, 1, 1, 1, 1, 0, 1];
        let b = [0, 0, 0, 0, 1, 1, 1, 1, 1, 0];
        assert!(jointly_typical(&[&a, &b], &j, 1e-9).unwrap());
        assert!(!jointly_typical(&[&a, &a], &j, 0.05).unwrap());
    }

    /// Brute force over all codewords of length `n` on a binary alphabet.
    fn brute_competitor(law: &[f64], pc: &[f64], side: &[usize], eps: f64) -> f64 {
        let n = side.len();
        let table = TypicalTable::new(law.to_vec(), eps, n);
        let mut total = 0.0;
        for word in 0..1usize << n {
            let c = |t: usize| (word >> t) & 1;
            let p: f64 = (0..n).map(|t| pc[c(t)]).product();
            if table.check_with(|t| side[t] * 2 + c(t)) {
                total += p;
            }
        }
        total
    }

    #[test]
    fn competitor_probability_matches_enumeration() {
        let law = [0.42, 0.08, 0.13, 0.37];
        let pc = [0.55, 0.45];
        let lnf = ln_factorials(16);
        for (side, eps) in [
            (vec![0, 0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 0], 0.1),
            (vec![0, 1, 1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 0, 1], 0.15),
            (vec![0; 10], 0.2),
        ] {
            let mut counts = [0usize; 2];
            side.iter().for_each(|&s| counts[s] += 1);
            let table = TypicalTable::new(law.to_vec(), eps, side.len());
            let dp = competitor_probability(&table, &pc, &counts, &lnf);
            let bf = brute_competitor(&law, &pc, &side, eps);
            assert!((dp - bf).abs() < 1e-12, "{dp} vs {bf}");
        }
    }

    #[test]
    fn any_of_small_q() {
        // 1 - (1 - q)^m = mq - (mq)^2 / 2 + ...
        assert!((any_of(1e-20, 1e10) - (1e-10 - 5e-21)).abs() < 1e-24);
        assert_eq!(any_of(0.0, 5.0), 0.0);
        assert!((any_of(0.5, 2.0) - 0.75).abs() < 1e-15);
    }
}
