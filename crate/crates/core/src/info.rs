//! Dense finite-alphabet distributions and the Shannon quantities built on them.
//!
//! All quantities are in bits. Tables are dense and row-major; the last axis
//! varies fastest.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed on the total mass of a distribution at construction.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Largest dense table (product of axis sizes) accepted anywhere.
pub const MAX_DENSE_ENTRIES: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("distribution has no support")]
    Empty,
    #[error("negative probability {value} at index {index}")]
    Negative { index: usize, value: f64 },
    #[error("non-finite probability at index {index}")]
    NonFinite { index: usize },
    #[error("probabilities sum to {sum}, not 1 (tolerance {NORMALIZATION_TOL:e})")]
    NotNormalized { sum: f64 },
    #[error("slice {slice} of conditional table: {source}")]
    BadSlice {
        slice: usize,
        #[source]
        source: Box<InfoError>,
    },
    #[error("value {value} outside [0, 1]")]
    Domain { value: f64 },
    #[error("axis {axis} out of range for a {rank}-axis table")]
    AxisOutOfRange { axis: usize, rank: usize },
    #[error("axis sets overlap or are empty")]
    AxisOverlap,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dense table of {entries} entries exceeds the cap of {MAX_DENSE_ENTRIES}")]
    TooLarge { entries: usize },
}

pub type Result<T> = std::result::Result<T, InfoError>;

fn check_mass(probs: &[f64]) -> Result<f64> {
    if probs.is_empty() {
        return Err(InfoError::Empty);
    }
    let mut sum = 0.0;
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() {
            return Err(InfoError::NonFinite { index });
        }
        if value < 0.0 {
            return Err(InfoError::Negative { index, value });
        }
        sum += value;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(InfoError::NotNormalized { sum });
    }
    Ok(sum)
}

fn dense_len(sizes: &[usize]) -> Result<usize> {
    let mut entries: usize = 1;
    for &s in sizes {
        if s == 0 {
            return Err(InfoError::Empty);
        }
        entries = entries
            .checked_mul(s)
            .filter(|&e| e <= MAX_DENSE_ENTRIES)
            .ok_or(InfoError::TooLarge { entries: usize::MAX })?;
    }
    Ok(entries)
}

/// `-sum p log2 p` over a slice, with `0 log 0 = 0`.
#[inline]
pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// A probability mass function over `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates the mass to within [`NORMALIZATION_TOL`]; values are kept as given.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_mass(&probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(InfoError::Empty);
        }
        Ok(Self { probs: vec![1.0 / n as f64; n] })
    }

    pub fn point_mass(n: usize, symbol: usize) -> Result<Self> {
        if symbol >= n {
            return Err(InfoError::DimensionMismatch(format!(
                "symbol {symbol} outside alphabet of size {n}"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[symbol] = 1.0;
        Ok(Self { probs })
    }

    /// `(P(0), P(1)) = (p, 1 - p)`.
    pub fn binary(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(InfoError::Domain { value: p });
        }
        Ok(Self { probs: vec![p, 1.0 - p] })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = InfoError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

/// A joint distribution over several finite random variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let len = dense_len(&sizes)?;
        if len != probs.len() {
            return Err(InfoError::DimensionMismatch(format!(
                "axis sizes {sizes:?} imply {len} entries, got {}",
                probs.len()
            )));
        }
        check_mass(&probs)?;
        Ok(Self { sizes, probs })
    }

    /// Skips validation; callers guarantee a normalized non-negative table.
    pub(crate) fn from_parts(sizes: Vec<usize>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(sizes.iter().product::<usize>(), probs.len());
        Self { sizes, probs }
    }

    /// Product distribution of independent marginals, in order.
    pub fn product(marginals: &[&Pmf]) -> Result<Self> {
        let sizes: Vec<usize> = marginals.iter().map(|m| m.len()).collect();
        dense_len(&sizes)?;
        let mut probs = vec![1.0];
        for m in marginals {
            probs = probs
                .iter()
                .flat_map(|&a| m.probs().iter().map(move |&b| a * b))
                .collect();
        }
        Ok(Self { sizes, probs })
    }

    /// Joint of an input pmf and a single-input channel: axes `(x, y)`.
    pub fn from_channel(input: &Pmf, channel: &ConditionalPmf) -> Result<Self> {
        if channel.input_sizes() != [input.len()] {
            return Err(InfoError::DimensionMismatch(format!(
                "channel inputs {:?} vs input alphabet {}",
                channel.input_sizes(),
                input.len()
            )));
        }
        let m = channel.output_size();
        let mut probs = Vec::with_capacity(input.len() * m);
        for (x, &px) in input.probs().iter().enumerate() {
            probs.extend(channel.row(x).iter().map(|&w| px * w));
        }
        Ok(Self { sizes: vec![input.len(), m], probs })
    }

    pub fn rank(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of one cell, addressed by per-axis symbols.
    pub fn get(&self, index: &[usize]) -> f64 {
        let mut flat = 0;
        for (&i, &s) in index.iter().zip(&self.sizes) {
            flat = flat * s + i;
        }
        self.probs[flat]
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        for &a in axes {
            if a >= self.rank() {
                return Err(InfoError::AxisOutOfRange { axis: a, rank: self.rank() });
            }
        }
        Ok(())
    }

    /// Marginal over `axes`, keeping the listed order. Duplicates are rejected.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointPmf> {
        self.check_axes(axes)?;
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].contains(a) {
                return Err(InfoError::AxisOverlap);
            }
        }
        let (sizes, probs) = self.marginal_table(axes);
        Ok(JointPmf { sizes, probs })
    }

    /// Marginal table without validation; `axes` must be distinct and in range.
    pub(crate) fn marginal_table(&self, axes: &[usize]) -> (Vec<usize>, Vec<f64>) {
        let rank = self.rank();
        let out_sizes: Vec<usize> = axes.iter().map(|&a| self.sizes[a]).collect();
        let out_len: usize = out_sizes.iter().product();
        // multiplier of each source axis in the output flat index
        let mut mult = vec![0usize; rank];
        let mut m = 1;
        for (k, &a) in axes.iter().enumerate().rev() {
            mult[a] = m;
            m *= out_sizes[k];
        }
        let mut out = vec![0.0; out_len];
        let mut digits = vec![0usize; rank];
        let mut pos = 0usize;
        for &p in &self.probs {
            out[pos] += p;
            // odometer increment, last axis fastest
            let mut ax = rank;
            while ax > 0 {
                ax -= 1;
                digits[ax] += 1;
                pos += mult[ax];
                if digits[ax] < self.sizes[ax] {
                    break;
                }
                pos -= mult[ax] * digits[ax];
                digits[ax] = 0;
            }
        }
        (out_sizes, out)
    }

    /// Joint entropy of the variables on `axes` (empty set gives 0).
    pub fn entropy_of(&self, axes: &[usize]) -> Result<f64> {
        if axes.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_bits(&self.marginal(axes)?.probs))
    }

    pub(crate) fn entropy_of_unchecked(&self, axes: &[usize]) -> f64 {
        if axes.is_empty() {
            return 0.0;
        }
        entropy_bits(&self.marginal_table(axes).1)
    }

    /// Flattens a one-axis joint into a [`Pmf`].
    pub fn to_pmf(&self) -> Result<Pmf> {
        if self.rank() != 1 {
            return Err(InfoError::DimensionMismatch(format!(
                "expected one axis, found {}",
                self.rank()
            )));
        }
        Ok(Pmf { probs: self.probs.clone() })
    }

    /// Same distribution with axes reordered: new axis `k` is old axis `order[k]`.
    pub fn permute_axes(&self, order: &[usize]) -> Result<JointPmf> {
        if order.len() != self.rank() {
            return Err(InfoError::DimensionMismatch("permutation length".into()));
        }
        self.marginal(order)
    }
}

/// A conditional law `P(out | in_1, .., in_k)`, one normalized row per input tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalPmf {
    input_sizes: Vec<usize>,
    output_size: usize,
    table: Vec<f64>,
}

impl ConditionalPmf {
    pub fn new(input_sizes: Vec<usize>, output_size: usize, table: Vec<f64>) -> Result<Self> {
        let rows = dense_len(&input_sizes)?;
        let len = dense_len(&[rows, output_size])?;
        if table.len() != len {
            return Err(InfoError::DimensionMismatch(format!(
                "inputs {input_sizes:?} x output {output_size} imply {len} entries, got {}",
                table.len()
            )));
        }
        for (slice, row) in table.chunks(output_size).enumerate() {
            check_mass(row).map_err(|e| InfoError::BadSlice {
                slice,
                source: Box::new(e),
            })?;
        }
        Ok(Self { input_sizes, output_size, table })
    }

    /// Builds a single-input law from its rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let output_size = rows.first().map(Vec::len).ok_or(InfoError::Empty)?;
        if rows.iter().any(|r| r.len() != output_size) {
            return Err(InfoError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(vec![rows.len()], output_size, rows.concat())
    }

    pub(crate) fn from_parts(input_sizes: Vec<usize>, output_size: usize, table: Vec<f64>) -> Self {
        Self { input_sizes, output_size, table }
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut table = vec![0.0; n * n];
        for i in 0..n {
            table[i * n + i] = 1.0;
        }
        Self::new(vec![n], n, table)
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(InfoError::Domain { value: p });
        }
        Self::new(vec![2], 2, vec![1.0 - p, p, p, 1.0 - p])
    }

    /// Output independent of the input, distributed as `out`.
    pub fn constant(input_sizes: Vec<usize>, out: &Pmf) -> Result<Self> {
        let rows = dense_len(&input_sizes)?;
        let table = (0..rows).flat_map(|_| out.probs().iter().copied()).collect();
        Self::new(input_sizes, out.len(), table)
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn num_rows(&self) -> usize {
        self.table.len() / self.output_size
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Output distribution for a flattened input index.
    pub fn row(&self, input: usize) -> &[f64] {
        &self.table[input * self.output_size..(input + 1) * self.output_size]
    }

    /// Flattened row index of an input tuple.
    pub fn row_index(&self, inputs: &[usize]) -> usize {
        inputs
            .iter()
            .zip(&self.input_sizes)
            .fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn prob(&self, inputs: &[usize], output: usize) -> f64 {
        self.row(self.row_index(inputs))[output]
    }

    /// Serial composition `P(z|x) = sum_y P(y|x) Q(z|y)` of single-input laws.
    pub fn compose(&self, next: &ConditionalPmf) -> Result<Self> {
        if self.input_sizes.len() != 1 || next.input_sizes != [self.output_size] {
            return Err(InfoError::DimensionMismatch(format!(
                "cannot compose {:?}->{} with {:?}->{}",
                self.input_sizes, self.output_size, next.input_sizes, next.output_size
            )));
        }
        let rows = self.num_rows();
        let m = next.output_size;
        let mut table = vec![0.0; rows * m];
        for x in 0..rows {
            for (y, &w) in self.row(x).iter().enumerate() {
                for (z, &q) in next.row(y).iter().enumerate() {
                    table[x * m + z] += w * q;
                }
            }
        }
        Ok(Self { input_sizes: self.input_sizes.clone(), output_size: m, table })
    }
}

/// Shannon entropy in bits.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_bits(p.probs())
}

/// `h(u) = -u log2 u - (1-u) log2 (1-u)`.
pub fn binary_entropy(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(InfoError::Domain { value: u });
    }
    Ok(h2(u))
}

/// Unchecked binary entropy for hot loops; `u` must lie in `[0, 1]`.
#[inline]
pub(crate) fn h2(u: f64) -> f64 {
    entropy_bits(&[u, 1.0 - u])
}

/// Binary convolution `u(1-v) + (1-u)v`.
pub fn star(u: f64, v: f64) -> Result<f64> {
    for value in [u, v] {
        if !(0.0..=1.0).contains(&value) {
            return Err(InfoError::Domain { value });
        }
    }
    Ok(star_unchecked(u, v))
}

#[inline]
pub(crate) fn star_unchecked(u: f64, v: f64) -> f64 {
    u * (1.0 - v) + (1.0 - u) * v
}

fn check_groups(j: &JointPmf, a: &[usize], b: &[usize], allow_empty_b: bool) -> Result<()> {
    if a.is_empty() || (b.is_empty() && !allow_empty_b) {
        return Err(InfoError::AxisOverlap);
    }
    j.check_axes(a)?;
    j.check_axes(b)?;
    let all: Vec<usize> = a.iter().chain(b).copied().collect();
    for (i, x) in all.iter().enumerate() {
        if all[..i].contains(x) {
            return Err(InfoError::AxisOverlap);
        }
    }
    Ok(())
}

/// `I(A; B) = H(A) + H(B) - H(A, B)` for disjoint axis groups.
pub fn mutual_information(j: &JointPmf, group_a: &[usize], group_b: &[usize]) -> Result<f64> {
    check_groups(j, group_a, group_b, false)?;
    Ok(mutual_information_unchecked(j, group_a, group_b))
}

pub(crate) fn mutual_information_unchecked(j: &JointPmf, a: &[usize], b: &[usize]) -> f64 {
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let mi = j.entropy_of_unchecked(a) + j.entropy_of_unchecked(b) - j.entropy_of_unchecked(&ab);
    mi.max(0.0)
}

/// `H(A | B) = H(A, B) - H(B)`; an empty `given` set yields `H(A)`.
pub fn conditional_entropy(j: &JointPmf, target: &[usize], given: &[usize]) -> Result<f64> {
    check_groups(j, target, given, true)?;
    Ok(conditional_entropy_unchecked(j, target, given))
}

pub(crate) fn conditional_entropy_unchecked(j: &JointPmf, target: &[usize], given: &[usize]) -> f64 {
    let ab: Vec<usize> = target.iter().chain(given).copied().collect();
    (j.entropy_of_unchecked(&ab) - j.entropy_of_unchecked(given)).max(0.0)
}

/// Axis positions in the joint returned by [`assemble_joint`].
pub mod axis {
    pub const U: usize = 0;
    pub const V: usize = 1;
    pub const X: usize = 2;
    pub const Y1: usize = 3;
    pub const Y2: usize = 4;
}

/// `P(u,v,x,y1,y2) = P(v|u,y1) P(y1,y2|x) P(x|u) P(u)` over axes `(u, v, x, y1, y2)`.
///
/// `channel` has input `[x]` and output `y1 * y2` flattened with `y2` fastest;
/// the `y1` alphabet is read from `pv_given_uy1`.
pub fn assemble_joint(
    pu: &Pmf,
    px_given_u: &ConditionalPmf,
    channel: &ConditionalPmf,
    pv_given_uy1: &ConditionalPmf,
) -> Result<JointPmf> {
    let nu = pu.len();
    if px_given_u.input_sizes() != [nu] {
        return Err(InfoError::DimensionMismatch(format!(
            "P(x|u) inputs {:?} vs |U| = {nu}",
            px_given_u.input_sizes()
        )));
    }
    let nx = px_given_u.output_size();
    if channel.input_sizes() != [nx] {
        return Err(InfoError::DimensionMismatch(format!(
            "channel inputs {:?} vs |X| = {nx}",
            channel.input_sizes()
        )));
    }
    let [vu, ny1] = pv_given_uy1.input_sizes() else {
        return Err(InfoError::DimensionMismatch("P(v|u,y1) must have two inputs".into()));
    };
    let (vu, ny1) = (*vu, *ny1);
    if vu != nu || channel.output_size() % ny1 != 0 {
        return Err(InfoError::DimensionMismatch(format!(
            "P(v|u,y1) inputs ({vu}, {ny1}) vs |U| = {nu}, channel outputs {}",
            channel.output_size()
        )));
    }
    let ny2 = channel.output_size() / ny1;
    let nv = pv_given_uy1.output_size();
    let sizes = vec![nu, nv, nx, ny1, ny2];
    dense_len(&sizes)?;
    Ok(assemble_unchecked(
        pu.probs(),
        px_given_u.table(),
        channel.table(),
        pv_given_uy1.table(),
        [nu, nv, nx, ny1, ny2],
    ))
}

/// Hot-path assembly from raw row-major tables.
pub(crate) fn assemble_unchecked(
    pu: &[f64],
    px_u: &[f64],
    ch: &[f64],
    pv_uy1: &[f64],
    [nu, nv, nx, ny1, ny2]: [usize; 5],
) -> JointPmf {
    let mut probs = vec![0.0; nu * nv * nx * ny1 * ny2];
    for u in 0..nu {
        if pu[u] == 0.0 {
            continue;
        }
        for x in 0..nx {
            let pux = pu[u] * px_u[u * nx + x];
            if pux == 0.0 {
                continue;
            }
            for y1 in 0..ny1 {
                for y2 in 0..ny2 {
                    let w = pux * ch[x * ny1 * ny2 + y1 * ny2 + y2];
                    if w == 0.0 {
                        continue;
                    }
                    for v in 0..nv {
                        let idx = (((u * nv + v) * nx + x) * ny1 + y1) * ny2 + y2;
                        probs[idx] = w * pv_uy1[(u * ny1 + y1) * nv + v];
                    }
                }
            }
        }
    }
    JointPmf::from_parts(vec![nu, nv, nx, ny1, ny2], probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Direct `-p ln p / ln 2` evaluation, independent of the kernel.
    fn h_ref(p: f64) -> f64 {
        let f = |q: f64| if q == 0.0 { 0.0 } else { -q * q.ln() / std::f64::consts::LN_2 };
        f(p) + f(1.0 - p)
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&Pmf::uniform(2).unwrap()), 1.0);
        assert_eq!(entropy(&Pmf::point_mass(3, 1).unwrap()), 0.0);
        let p = Pmf::new(vec![0.11, 0.89]).unwrap();
        assert_abs_diff_eq!(entropy(&p), h_ref(0.11), epsilon = 1e-15);
        // 0.499915958164528 to 15 digits
        assert_abs_diff_eq!(entropy(&p), 0.499915958164528, epsilon = 1e-14);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.2).unwrap(), 0.7219280948873623, epsilon = 1e-15);
        assert!(matches!(binary_entropy(1.2), Err(InfoError::Domain { .. })));
        assert!(binary_entropy(-0.01).is_err());
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(0.3, 0.5).unwrap(), 0.5);
        assert_eq!(star(0.37, 0.0).unwrap(), 0.37);
        assert_abs_diff_eq!(star(0.5, 0.2).unwrap(), 0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(star(0.1, 0.15).unwrap(), 0.22, epsilon = 1e-15);
        assert!(star(0.3, 1.5).is_err());
    }

    #[test]
    fn pmf_validation() {
        assert!(matches!(Pmf::new(vec![]), Err(InfoError::Empty)));
        assert!(matches!(Pmf::new(vec![0.5, -0.1, 0.6]), Err(InfoError::Negative { index: 1, .. })));
        assert!(matches!(Pmf::new(vec![0.5, 0.499]), Err(InfoError::NotNormalized { .. })));
        assert!(Pmf::new(vec![0.5, 0.5 + 5e-10]).is_ok());
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn dense_cap_enforced() {
        let err = JointPmf::new(vec![10_000, 10_000], vec![]).unwrap_err();
        assert!(matches!(err, InfoError::TooLarge { .. }));
    }

    #[test]
    fn conditional_rejects_bad_slice() {
        let err = ConditionalPmf::new(vec![2], 2, vec![0.5, 0.5, 0.7, 0.2]).unwrap_err();
        assert!(matches!(err, InfoError::BadSlice { slice: 1, .. }));
    }

    #[test]
    fn mutual_information_examples() {
        let a = Pmf::new(vec![0.3, 0.7]).unwrap();
        let b = Pmf::new(vec![0.2, 0.5, 0.3]).unwrap();
        let prod = JointPmf::product(&[&a, &b]).unwrap();
        assert_abs_diff_eq!(mutual_information(&prod, &[0], &[1]).unwrap(), 0.0, epsilon = 1e-14);

        let copy = JointPmf::from_channel(&b, &ConditionalPmf::identity(3).unwrap()).unwrap();
        assert_abs_diff_eq!(
            mutual_information(&copy, &[0], &[1]).unwrap(),
            entropy(&b),
            epsilon = 1e-14
        );

        let bsc = JointPmf::from_channel(&Pmf::uniform(2).unwrap(), &ConditionalPmf::bsc(0.1).unwrap())
            .unwrap();
        assert_abs_diff_eq!(
            mutual_information(&bsc, &[0], &[1]).unwrap(),
            1.0 - h_ref(0.1),
            epsilon = 1e-14
        );

        assert!(matches!(mutual_information(&bsc, &[0], &[0]), Err(InfoError::AxisOverlap)));
        assert!(matches!(mutual_information(&bsc, &[0], &[]), Err(InfoError::AxisOverlap)));
        assert!(matches!(
            mutual_information(&bsc, &[0], &[2]),
            Err(InfoError::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn conditional_entropy_examples() {
        let x = Pmf::new(vec![0.4, 0.6]).unwrap();
        // Y = X xor Z, Z ~ Bern(0.05)
        let j = JointPmf::from_channel(&x, &ConditionalPmf::bsc(0.05).unwrap()).unwrap();
        assert_abs_diff_eq!(conditional_entropy(&j, &[1], &[0]).unwrap(), h_ref(0.05), epsilon = 1e-14);

        let det = JointPmf::from_channel(&x, &ConditionalPmf::identity(2).unwrap()).unwrap();
        assert_abs_diff_eq!(conditional_entropy(&det, &[1], &[0]).unwrap(), 0.0, epsilon = 1e-14);

        let y = Pmf::new(vec![0.1, 0.2, 0.7]).unwrap();
        let ind = JointPmf::product(&[&x, &y]).unwrap();
        assert_abs_diff_eq!(
            conditional_entropy(&ind, &[1], &[0]).unwrap(),
            entropy(&y),
            epsilon = 1e-14
        );
        assert!(conditional_entropy(&ind, &[1], &[1]).is_err());
    }

    #[test]
    fn assemble_joint_examples() {
        let u = Pmf::uniform(2).unwrap();
        let id = ConditionalPmf::identity(2).unwrap();
        // identity channel into (y1, y2): both copy x
        let ch = ConditionalPmf::new(vec![2], 4, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let v = ConditionalPmf::constant(vec![2, 2], &Pmf::uniform(3).unwrap()).unwrap();
        let j = assemble_joint(&u, &id, &ch, &v).unwrap();
        assert_eq!(j.sizes(), &[2, 3, 2, 2, 2]);
        let mu = j.marginal(&[axis::U]).unwrap();
        assert_abs_diff_eq!(mu.probs()[0], 0.5, epsilon = 1e-15);

        // constant V: marginalizing V gives P(y1,y2|x) P(u,x)
        let v1 = ConditionalPmf::constant(vec![2, 2], &Pmf::point_mass(1, 0).unwrap()).unwrap();
        let px_u = ConditionalPmf::bsc(0.3).unwrap();
        let ch = crate::channel::make_binary_channel(crate::channel::BinaryWiretapParams::new(0.1, 0.2).unwrap());
        let j = assemble_joint(&u, &px_u, ch.law(), &v1).unwrap();
        let m = j.marginal(&[axis::U, axis::X, axis::Y1, axis::Y2]).unwrap();
        for uu in 0..2 {
            for x in 0..2 {
                for y1 in 0..2 {
                    for y2 in 0..2 {
                        let want = 0.5 * px_u.prob(&[uu], x) * ch.law().prob(&[x], y1 * 2 + y2);
                        assert_abs_diff_eq!(m.get(&[uu, x, y1, y2]), want, epsilon = 1e-15);
                    }
                }
            }
        }

        // binary law, alpha = 0.5: P(Y1 = 0) = 0.5 star 0.1 = 0.5
        let pu = Pmf::point_mass(1, 0).unwrap();
        let px = ConditionalPmf::new(vec![1], 2, vec![0.5, 0.5]).unwrap();
        let pv = ConditionalPmf::constant(vec![1, 2], &Pmf::point_mass(1, 0).unwrap()).unwrap();
        let j = assemble_joint(&pu, &px, ch.law(), &pv).unwrap();
        assert_abs_diff_eq!(j.marginal(&[axis::Y1]).unwrap().probs()[0], 0.5, epsilon = 1e-15);

        let bad = ConditionalPmf::identity(3).unwrap();
        assert!(matches!(
            assemble_joint(&u, &bad, ch.law(), &v1),
            Err(InfoError::DimensionMismatch(_))
        ));
    }

    fn pmf_strategy(n: usize) -> impl Strategy<Value = Pmf> {
        prop::collection::vec(0.0f64..1.0, n).prop_filter_map("zero mass", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| Pmf::new(w.iter().map(|x| x / s).collect()).unwrap())
        })
    }

    fn joint_strategy() -> impl Strategy<Value = JointPmf> {
        (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(a, b, c)| {
            pmf_strategy(a * b * c).prop_map(move |p| JointPmf::new(vec![a, b, c], p.probs().to_vec()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn entropy_bounds(n in 1usize..9, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let s: f64 = w.iter().sum();
            let p = Pmf::new(w.iter().map(|x| x / s).collect()).unwrap();
            let h = entropy(&p);
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (n as f64).log2() + 1e-12);
        }

        #[test]
        fn mi_nonnegative_and_monotone(j in joint_strategy()) {
            let ab = mutual_information(&j, &[0], &[1]).unwrap();
            let abc = mutual_information(&j, &[0], &[1, 2]).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert!(abc + 1e-12 >= ab);
            let ba = mutual_information(&j, &[1], &[0]).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
        }

        #[test]
        fn chain_rule(j in joint_strategy()) {
            let hab = j.entropy_of(&[0, 1]).unwrap();
            let hb = j.entropy_of(&[1]).unwrap();
            let ha_b = conditional_entropy(&j, &[0], &[1]).unwrap();
            prop_assert!((hab - hb - ha_b).abs() < 1e-9);
            prop_assert!(ha_b <= j.entropy_of(&[0]).unwrap() + 1e-12);
        }

        #[test]
        fn assemble_normalized_and_equivariant(
            pu in pmf_strategy(3),
            r1 in pmf_strategy(2), r2 in pmf_strategy(2), r3 in pmf_strategy(2),
            vrows in prop::collection::vec(pmf_strategy(2), 6),
        ) {
            let px_u = ConditionalPmf::from_rows(&[r1.probs().to_vec(), r2.probs().to_vec(), r3.probs().to_vec()]).unwrap();
            let vt: Vec<f64> = vrows.iter().flat_map(|p| p.probs().to_vec()).collect();
            let pv = ConditionalPmf::new(vec![3, 2], 2, vt.clone()).unwrap();
            let ch = crate::channel::make_binary_channel(crate::channel::BinaryWiretapParams::new(0.1, 0.3).unwrap());
            let j = assemble_joint(&pu, &px_u, ch.law(), &pv).unwrap();
            let total: f64 = j.probs().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);

            // relabel u by the cycle 0->1->2->0
            let perm = [2usize, 0, 1]; // new u' = k holds old u = perm[k]
            let pu2 = Pmf::new(perm.iter().map(|&o| pu.get(o)).collect()).unwrap();
            let px2 = ConditionalPmf::from_rows(&perm.iter().map(|&o| px_u.row(o).to_vec()).collect::<Vec<_>>()).unwrap();
            let mut vt2 = Vec::new();
            for &o in &perm { for y1 in 0..2 { vt2.extend_from_slice(pv.row(o * 2 + y1)); } }
            let pv2 = ConditionalPmf::new(vec![3, 2], 2, vt2).unwrap();
            let j2 = assemble_joint(&pu2, &px2, ch.law(), &pv2).unwrap();
            for k in 0..3 { for v in 0..2 { for x in 0..2 { for y1 in 0..2 { for y2 in 0..2 {
                prop_assert!((j2.get(&[k, v, x, y1, y2]) - j.get(&[perm[k], v, x, y1, y2])).abs() < 1e-15);
            }}}}}
        }
    }
}
