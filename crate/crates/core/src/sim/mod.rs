//! Small-block random-coding simulation of the feedback schemes.
//!
//! Codebooks are pseudorandom: codeword `m` of a codebook is the output of a
//! ChaCha stream keyed by `(seed, trial, block, codebook)` at stream `m`, so
//! nothing is stored. Searches over at most `2^explicit_max_bits` candidates
//! run literally. Larger searches use the ensemble form: the transmitted
//! codeword is drawn directly, and the chance that some competitor passes the
//! typicality test is computed exactly from the observed sequences.

mod coloring;
mod engine;
mod exact;
mod region;
mod typical;
mod wz;

pub use coloring::{chi_square_uniformity, empirical_mutual_information, generate_key_coloring, KeyColoring};
pub use engine::{run_dmc_feedback_sim, run_wiretap_feedback_sim};
pub use exact::{exact_small_equivocation, ExactSmall, EXACT_MAX_BLOCK_LEN};
pub use region::{rate_region_check, region_from_info, Constraint, ConstraintCheck, RegionReport};
pub use typical::{jointly_typical, typical_set_test};
pub use wz::{run_wz_sim, wz_encode_decode_trial, WzRates};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundsError;
use crate::info::InfoError;

/// Hard ceiling on literal candidate enumeration.
pub const MAX_EXPLICIT_BITS: u32 = 22;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation configuration: {0}")]
    Config(String),
    #[error("symbol {symbol} outside alphabet of size {size}")]
    Alphabet { symbol: usize, size: usize },
    #[error("{key_bits} key bits exceed the block's conditional entropy budget of {budget:.4} bits")]
    KeyRate { key_bits: u32, budget: f64 },
    #[error("infeasible rates; violated: {}", .violated.iter().map(|c| c.describe()).collect::<Vec<_>>().join("; "))]
    Infeasible { violated: Vec<Constraint>, report: Box<RegionReport> },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// Rates in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateAllocation {
    pub r1: f64,
    pub r2: f64,
    pub r_prime: f64,
    pub r_star: f64,
    pub r_tilde: f64,
}

impl RateAllocation {
    pub fn validate(&self) -> Result<(), SimError> {
        for (name, r) in [
            ("r1", self.r1),
            ("r2", self.r2),
            ("r_prime", self.r_prime),
            ("r_star", self.r_star),
            ("r_tilde", self.r_tilde),
        ] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(SimError::Config(format!("{name} = {r} must be a nonnegative number")));
            }
        }
        if self.r_tilde < self.r_star {
            return Err(SimError::Config(format!(
                "r_tilde = {} must be at least r_star = {}",
                self.r_tilde, self.r_star
            )));
        }
        Ok(())
    }
}

/// Index bits of one block: `floor(N R)` per rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockBits {
    pub b1: u32,
    pub b2: u32,
    pub b_prime: u32,
    pub b_star: u32,
    pub b_tilde: u32,
}

impl BlockBits {
    pub fn new(rates: &RateAllocation, block_len: usize) -> Self {
        let f = |r: f64| (block_len as f64 * r + 1e-9).floor() as u32;
        Self {
            b1: f(rates.r1),
            b2: f(rates.r2),
            b_prime: f(rates.r_prime),
            b_star: f(rates.r_star),
            b_tilde: f(rates.r_tilde),
        }
    }

    /// Bits of a `u` codeword index.
    pub fn u_bits(&self) -> u32 {
        self.b1 + self.b2 + self.b_prime + self.b_star
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Number of blocks.
    pub n: usize,
    /// Symbols per block.
    #[serde(rename = "N")]
    pub block_len: usize,
    pub rates: RateAllocation,
    pub epsilon: f64,
    pub seed: u64,
    pub trials: usize,
    /// Searches over more candidates than `2^explicit_max_bits` use the ensemble form.
    #[serde(default = "default_explicit_bits")]
    pub explicit_max_bits: u32,
}

fn default_explicit_bits() -> u32 {
    14
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n < 3 {
            return Err(SimError::Config(format!("n = {} but the scheme needs at least 3 blocks", self.n)));
        }
        if self.block_len == 0 {
            return Err(SimError::Config("N must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(SimError::Config(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if self.trials == 0 {
            return Err(SimError::Config("trials must be positive".into()));
        }
        if self.explicit_max_bits > MAX_EXPLICIT_BITS {
            return Err(SimError::Config(format!(
                "explicit_max_bits = {} exceeds {MAX_EXPLICIT_BITS}",
                self.explicit_max_bits
            )));
        }
        self.rates.validate()?;
        let bits = BlockBits::new(&self.rates, self.block_len);
        if bits.b2 > 63 {
            return Err(SimError::Config(format!("{} key bits per block exceed 63", bits.b2)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    Wynerziv,
    Dmc,
    Wiretap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookMode {
    Explicit,
    Ensemble,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub mode: SimMode,
    pub config: SimConfig,
    pub bits: BlockBits,
    pub codebook_mode: CodebookMode,
    /// Fraction of message-carrying blocks decoded wrongly; in ensemble mode
    /// the competitor part is the exact conditional expectation.
    pub decode_error_rate: f64,
    pub encoder_failure_rate: f64,
    /// Plug-in value of the equivocation lower bound, bits per symbol.
    pub measured_equivocation_rate: Option<f64>,
    /// Brute-force wiretapper equivocation for tiny configurations.
    pub exact_small: Option<ExactSmall>,
    /// Key counts over `trials * (n - 2)` keyed blocks, on the low 16 key bits.
    pub key_histogram: Vec<u64>,
    pub key_chi_square_p_value: f64,
    /// Plug-in `I(K; W2)` over the keyed blocks.
    pub key_message_mutual_information: f64,
}

pub(crate) mod codebook {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use sha2::{Digest, Sha256};

    pub const U_BOOK: u8 = 0;
    pub const V_BOOK: u8 = 1;

    /// Generator keyed by the run seed and a context tuple.
    pub fn keyed_rng(seed: u64, tag: &[u8], context: &[u64]) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(tag);
        h.update(seed.to_le_bytes());
        for c in context {
            h.update(c.to_le_bytes());
        }
        let d = h.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&d);
        ChaCha8Rng::from_seed(key)
    }

    /// Inverse-CDF draw from `p`.
    pub fn draw(rng: &mut impl Rng, p: &[f64]) -> usize {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &q) in p.iter().enumerate() {
            acc += q;
            if r < acc {
                return i;
            }
        }
        // rounding left a sliver above the last nonzero entry
        p.iter().rposition(|&q| q > 0.0).unwrap_or(0)
    }

    /// A codebook of i.i.d. codewords drawn from `law`.
    pub struct Codebook<'a> {
        key: [u8; 32],
        law: &'a [f64],
        len: usize,
    }

    impl<'a> Codebook<'a> {
        pub fn new(seed: u64, trial: u64, block: u64, book: u8, law: &'a [f64], len: usize) -> Self {
            let rng = keyed_rng(seed, b"wtfb-codebook", &[trial, block, book as u64]);
            Self { key: rng.get_seed(), law, len }
        }

        pub fn word_into(&self, index: u64, out: &mut Vec<usize>) {
            let mut rng = ChaCha8Rng::from_seed(self.key);
            rng.set_stream(index);
            out.clear();
            out.extend((0..self.len).map(|_| draw(&mut rng, self.law)));
        }

        pub fn word(&self, index: u64) -> Vec<usize> {
            let mut w = Vec::with_capacity(self.len);
            self.word_into(index, &mut w);
            w
        }
    }
}
