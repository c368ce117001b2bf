//! Secret keys from the fed-back output: a seeded uniform hash of the whole
//! `y1` block into `2^key_bits` colors, shared by every party of a run.

use sha2::{Digest, Sha256};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::SimError;

#[derive(Debug, Clone, PartialEq)]
pub struct KeyColoring {
    key_bits: u32,
    seed: u64,
}

impl KeyColoring {
    /// `h_y1_given_uy2` is `H(Y1|U,Y2)` in bits; the key may not carry more
    /// than `block_len` times that.
    pub fn new(key_bits: u32, block_len: usize, h_y1_given_uy2: f64, seed: u64) -> Result<Self, SimError> {
        let budget = block_len as f64 * h_y1_given_uy2;
        if key_bits > 63 || key_bits as f64 > budget + 1e-9 {
            return Err(SimError::KeyRate { key_bits, budget });
        }
        Ok(Self { key_bits, seed })
    }

    pub fn key_bits(&self) -> u32 {
        self.key_bits
    }

    /// Color in `0..2^key_bits` of `y1_block` observed in block `block`.
    pub fn key(&self, block: usize, y1_block: &[usize]) -> u64 {
        generate_key_coloring(y1_block, block, self.key_bits, self.seed)
    }
}

/// Seeded uniform coloring; `key_bits = 0` always gives key 0.
pub fn generate_key_coloring(y1_block: &[usize], block: usize, key_bits: u32, seed: u64) -> u64 {
    if key_bits == 0 {
        return 0;
    }
    let mut h = Sha256::new();
    h.update(b"wtfb-key");
    h.update(seed.to_le_bytes());
    h.update((block as u64).to_le_bytes());
    for &s in y1_block {
        h.update((s as u32).to_le_bytes());
    }
    let d = h.finalize();
    let word = u64::from_le_bytes(d[..8].try_into().expect("32-byte digest"));
    word & ((1u64 << key_bits) - 1)
}

/// Pearson statistic and p-value of `hist` against the uniform law.
pub fn chi_square_uniformity(hist: &[u64]) -> (f64, f64) {
    let total: u64 = hist.iter().sum();
    if hist.len() < 2 || total == 0 {
        return (0.0, 1.0);
    }
    let expected = total as f64 / hist.len() as f64;
    let stat: f64 = hist.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((hist.len() - 1) as f64).expect("positive degrees of freedom");
    (stat, 1.0 - dist.cdf(stat))
}

/// Plug-in mutual information in bits between paired symbols.
pub fn empirical_mutual_information(pairs: &[(u64, u64)]) -> f64 {
    use std::collections::BTreeMap;
    if pairs.is_empty() {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let mut joint: BTreeMap<(u64, u64), f64> = BTreeMap::new();
    let mut a: BTreeMap<u64, f64> = BTreeMap::new();
    let mut b: BTreeMap<u64, f64> = BTreeMap::new();
    for &(x, y) in pairs {
        *joint.entry((x, y)).or_default() += 1.0;
        *a.entry(x).or_default() += 1.0;
        *b.entry(y).or_default() += 1.0;
    }
    joint
        .iter()
        .map(|(&(x, y), &c)| c / n * (c * n / (a[&x] * b[&y])).log2())
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_bits_is_constant() {
        assert_eq!(generate_key_coloring(&[1, 0, 1], 3, 0, 9), 0);
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let y = [0, 1, 1, 0, 1];
        assert_eq!(generate_key_coloring(&y, 2, 8, 5), generate_key_coloring(&y, 2, 8, 5));
        let differ = (0..16).any(|s| generate_key_coloring(&y, 2, 8, s) != generate_key_coloring(&y, 2, 8, 5));
        assert!(differ);
    }

    #[test]
    fn histogram_passes_uniformity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hist = vec![0u64; 16];
        for _ in 0..20_000 {
            let y: Vec<usize> = (0..32).map(|_| rng.gen_range(0..2)).collect();
            hist[generate_key_coloring(&y, 1, 4, 11) as usize] += 1;
        }
        let (_, p) = chi_square_uniformity(&hist);
        assert!(p >= 0.01, "p = {p}");
    }

    #[test]
    fn skewed_histogram_fails() {
        let (_, p) = chi_square_uniformity(&[200, 100, 100, 100]);
        assert!(p < 0.01);
    }

    #[test]
    fn key_rate_budget() {
        assert!(KeyColoring::new(3, 8, 0.4, 1).is_ok());
        assert!(matches!(KeyColoring::new(4, 8, 0.4, 1), Err(SimError::KeyRate { .. })));
    }

    #[test]
    fn plug_in_mi() {
        let same: Vec<(u64, u64)> = (0..100).map(|i| (i % 2, i % 2)).collect();
        assert!((empirical_mutual_information(&same) - 1.0).abs() < 1e-12);
        let indep: Vec<(u64, u64)> = (0..100).map(|i| (i % 2, (i / 2) % 2)).collect();
        assert!(empirical_mutual_information(&indep) < 1e-12);
    }
}
