//! Multi-start maximization over products of probability simplexes.
//!
//! A deterministic grid (full, or a stratified sample of it when the product
//! is too large) seeds coordinate ascent. Ascent moves mass between pairs of
//! coordinates of one simplex block, with occasional joint moves across
//! blocks, and halves its step when a sweep brings no gain.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Grid points per degree of freedom of each simplex block.
    pub grid_resolution: usize,
    /// Grid resolution of the input-law coordinate in the binary optimization.
    pub alpha_resolution: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Above this many grid points the grid is sampled rather than enumerated.
    pub max_grid_points: usize,
    pub max_sweeps: usize,
    pub initial_step: f64,
    /// Ascent stops once the step falls below this.
    pub min_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 9,
            alpha_resolution: 11,
            restarts: 16,
            seed: 42,
            max_grid_points: 200_000,
            max_sweeps: 400,
            initial_step: 0.125,
            min_step: 1e-9,
        }
    }
}

/// One probability simplex of `size` coordinates, gridded at `resolution`
/// points per degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub size: usize,
    pub resolution: usize,
}

/// A product of simplex blocks laid out contiguously in one parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexDomain {
    blocks: Vec<Block>,
    offsets: Vec<usize>,
}

impl SimplexDomain {
    pub fn new(blocks: Vec<Block>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut o = 0;
        for b in &blocks {
            assert!(b.size >= 1 && b.resolution >= 2, "degenerate block {b:?}");
            offsets.push(o);
            o += b.size;
        }
        Self { blocks, offsets }
    }

    /// `count` blocks of the same shape.
    pub fn repeated(count: usize, size: usize, resolution: usize) -> Vec<Block> {
        vec![Block { size, resolution }; count]
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block<'a>(&self, x: &'a [f64], k: usize) -> &'a [f64] {
        &x[self.offsets[k]..self.offsets[k] + self.blocks[k].size]
    }

    /// Every block uniform.
    pub fn center(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat(1.0 / b.size as f64).take(b.size))
            .collect()
    }

    fn block_grid(b: Block) -> Vec<Vec<f64>> {
        let steps = b.resolution - 1;
        let mut out = Vec::new();
        let mut cur = vec![0usize; b.size];
        compositions(steps, 0, &mut cur, &mut out);
        out.into_iter()
            .map(|c| c.into_iter().map(|k| k as f64 / steps as f64).collect())
            .collect()
    }
}

fn compositions(remaining: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    // larger leading parts first so vertices come early
    for k in (0..=remaining).rev() {
        cur[pos] = k;
        compositions(remaining - k, pos + 1, cur, out);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerTrace {
    pub grid_points: usize,
    pub evaluations: usize,
    /// Ascent sweeps summed over restarts.
    pub iterations: usize,
    pub restarts: usize,
    pub best_per_restart: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub trace: OptimizerTrace,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximizes `objective` over `domain`.
///
/// `extra_starts` are ascended in addition to the best grid points; they let a
/// caller embed a known feasible solution (for example a nested bound's
/// argmax). Output depends only on the inputs, not on the thread count.
pub fn maximize<F>(
    domain: &SimplexDomain,
    objective: F,
    config: &OptimizerConfig,
    extra_starts: &[Vec<f64>],
) -> Optimum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let grids: Vec<Vec<Vec<f64>>> = domain.blocks.iter().map(|&b| SimplexDomain::block_grid(b)).collect();
    let total = grids
        .iter()
        .try_fold(1usize, |acc, g| acc.checked_mul(g.len()))
        .unwrap_or(usize::MAX);

    let picks: Vec<Vec<usize>> = if total <= config.max_grid_points {
        (0..total)
            .map(|mut flat| {
                let mut idx = vec![0; grids.len()];
                for k in (0..grids.len()).rev() {
                    idx[k] = flat % grids[k].len();
                    flat /= grids[k].len();
                }
                idx
            })
            .collect()
    } else {
        // each block cycles through shuffled passes over its own grid
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_0001);
        let n = config.max_grid_points;
        let columns: Vec<Vec<usize>> = grids
            .iter()
            .map(|g| {
                let mut col = Vec::with_capacity(n);
                while col.len() < n {
                    let mut perm: Vec<usize> = (0..g.len()).collect();
                    perm.shuffle(&mut rng);
                    col.extend(perm);
                }
                col.truncate(n);
                col
            })
            .collect();
        (0..n).map(|s| columns.iter().map(|c| c[s]).collect()).collect()
    };

    let assemble = |idx: &[usize]| -> Vec<f64> {
        idx.iter().zip(&grids).flat_map(|(&i, g)| g[i].iter().copied()).collect()
    };
    let values: Vec<f64> = picks
        .par_iter()
        .map(|idx| sanitize(objective(&assemble(idx))))
        .collect();

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut starts: Vec<Vec<f64>> = extra_starts.to_vec();
    for &i in order.iter().take(config.restarts) {
        starts.push(assemble(&picks[i]));
    }
    if starts.is_empty() {
        starts.push(domain.center());
    }

    let runs: Vec<(Vec<f64>, f64, usize, usize)> = starts
        .par_iter()
        .enumerate()
        .map(|(r, start)| ascend(domain, &objective, config, start.clone(), r as u64))
        .collect();

    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1 > runs[best].1 {
            best = r;
        }
    }
    let trace = OptimizerTrace {
        grid_points: picks.len(),
        evaluations: picks.len() + runs.iter().map(|r| r.3).sum::<usize>(),
        iterations: runs.iter().map(|r| r.2).sum(),
        restarts: runs.len(),
        best_per_restart: runs.iter().map(|r| r.1).collect(),
    };
    let (point, value, _, _) = runs.into_iter().nth(best).expect("at least one start");
    Optimum { point, value, trace }
}

/// Coordinate ascent from `x`; returns (point, value, sweeps, evaluations).
fn ascend<F>(
    domain: &SimplexDomain,
    objective: &F,
    config: &OptimizerConfig,
    mut x: Vec<f64>,
    restart: u64,
) -> (Vec<f64>, f64, usize, usize)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(restart.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    let mut fx = sanitize(objective(&x));
    let mut evals = 1;
    let mut step = config.initial_step;
    let mut sweeps = 0;
    let mut trial = x.clone();

    while step >= config.min_step && sweeps < config.max_sweeps {
        sweeps += 1;
        let mut improved = false;
        for (k, b) in domain.blocks.iter().enumerate() {
            let o = domain.offsets[k];
            for i in 0..b.size {
                for j in 0..b.size {
                    if i == j {
                        continue;
                    }
                    // keep pushing mass j -> i while it pays, doubling the move
                    let mut delta = step;
                    loop {
                        let d = delta.min(x[o + j]);
                        if d <= 0.0 {
                            break;
                        }
                        trial.copy_from_slice(&x);
                        trial[o + i] += d;
                        trial[o + j] -= d;
                        let ft = sanitize(objective(&trial));
                        evals += 1;
                        if ft > fx {
                            std::mem::swap(&mut x, &mut trial);
                            fx = ft;
                            improved = true;
                            delta *= 2.0;
                        } else {
                            break;
                        }
                    }
                }
            }
        }
        if !improved && domain.blocks.len() > 1 {
            // joint moves get past ridges where single-block moves all lose
            for _ in 0..4 * domain.blocks.len() {
                trial.copy_from_slice(&x);
                for (k, b) in domain.blocks.iter().enumerate() {
                    if b.size < 2 {
                        continue;
                    }
                    let o = domain.offsets[k];
                    let i = rng.gen_range(0..b.size);
                    let mut j = rng.gen_range(0..b.size - 1);
                    if j >= i {
                        j += 1;
                    }
                    let d = (step * rng.gen::<f64>()).min(trial[o + j]);
                    trial[o + i] += d;
                    trial[o + j] -= d;
                }
                let ft = sanitize(objective(&trial));
                evals += 1;
                if ft > fx {
                    std::mem::swap(&mut x, &mut trial);
                    fx = ft;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx, sweeps, evals)
}
