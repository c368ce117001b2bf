//! Wiretap channel models `P(y1, y2 | x)`: construction, structure checks and
//! the JSON channel file format.
//!
//! A channel file looks like
//!
//! ```json
//! {
//!   "x_size": 2, "y1_size": 2, "y2_size": 2,
//!   "law": [[[0.72, 0.18], [0.08, 0.02]], [[0.02, 0.08], [0.18, 0.72]]],
//!   "structure": "non_degraded"
//! }
//! ```
//!
//! where `law[x][y1][y2] = P(y1, y2 | x)`. `structure` is optional; when absent
//! it is inferred from the law.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::info::{ConditionalPmf, InfoError, NORMALIZATION_TOL};
use crate::lp;

/// Tolerance for the product-form test `P(y1,y2|x) = P(y1|x) P(y2|x)`.
pub const FACTORIZATION_TOL: f64 = 1e-9;
/// Tolerance for the existence of a degrading matrix.
pub const DEGRADATION_TOL: f64 = 1e-6;
/// Largest alphabet for which the degrading-matrix search is run.
pub const DEGRADATION_CHECK_MAX_ALPHABET: usize = 4;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid {field}: {message}")]
    Invariant { field: String, message: String },
    #[error("structure tag {tag:?} does not hold: {message}")]
    Structure { tag: StructureTag, message: String },
    #[error("invalid binary parameters: {0}")]
    Params(String),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureTag {
    General,
    /// `X -> Y1 -> Y2` holds for the joint law.
    PhysicallyDegraded,
    /// `Y1 -> X -> Y2`: the outputs are independent given the input.
    NonDegraded,
}

/// Crossovers of the binary model `Y1 = X xor Z1`, `Y2 = X xor Z2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryWiretapParams {
    pub p1: f64,
    pub p2: f64,
}

impl BinaryWiretapParams {
    /// Both crossovers must lie in `[0, 0.5)`.
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..0.5).contains(&p) {
                return Err(ChannelError::Params(format!("{name} = {p} is outside [0, 0.5)")));
            }
        }
        Ok(Self { p1, p2 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WiretapChannel {
    x_size: usize,
    y1_size: usize,
    y2_size: usize,
    law: ConditionalPmf,
    structure: StructureTag,
}

/// Outcome of the degrading-matrix search on the output marginals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegradingMatrix {
    /// Row-major `D(y2|y1)` with `P(y2|x) = sum_y1 P(y1|x) D(y2|y1)`.
    Found(Vec<f64>),
    Infeasible { residual: f64 },
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub tag: StructureTag,
    /// `P(y1,y2|x) = P(y1|x) P(y2|x)` within [`FACTORIZATION_TOL`].
    pub factorizes: bool,
    /// `P(y1,y2|x) = P(y1|x) D(y2|y1)` holds for the joint law.
    pub joint_markov: bool,
    /// Stochastic degradedness of the marginals.
    pub degrading: DegradingMatrix,
    /// Tag the law itself supports.
    pub inferred: StructureTag,
}

impl WiretapChannel {
    /// Builds a channel from `law[x][y1][y2]`; with `structure = None` the tag is inferred.
    pub fn new(
        x_size: usize,
        y1_size: usize,
        y2_size: usize,
        law: ConditionalPmf,
        structure: Option<StructureTag>,
    ) -> Result<Self> {
        if law.input_sizes() != [x_size] || law.output_size() != y1_size * y2_size {
            return Err(ChannelError::Invariant {
                field: "law".into(),
                message: format!(
                    "shape {:?} -> {} does not match {x_size} x ({y1_size} x {y2_size})",
                    law.input_sizes(),
                    law.output_size()
                ),
            });
        }
        let mut ch = Self { x_size, y1_size, y2_size, law, structure: StructureTag::General };
        ch.structure = match structure {
            None => ch.infer_structure(),
            Some(tag) => {
                ch.check_tag(tag)?;
                tag
            }
        };
        Ok(ch)
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }
    pub fn y1_size(&self) -> usize {
        self.y1_size
    }
    pub fn y2_size(&self) -> usize {
        self.y2_size
    }
    pub fn structure(&self) -> StructureTag {
        self.structure
    }

    /// `P(y1, y2 | x)` with output index `y1 * y2_size + y2`.
    pub fn law(&self) -> &ConditionalPmf {
        &self.law
    }

    pub fn prob(&self, x: usize, y1: usize, y2: usize) -> f64 {
        self.law.row(x)[y1 * self.y2_size + y2]
    }

    /// `P(y1 | x)`.
    pub fn main_channel(&self) -> ConditionalPmf {
        let mut t = vec![0.0; self.x_size * self.y1_size];
        for x in 0..self.x_size {
            for y1 in 0..self.y1_size {
                t[x * self.y1_size + y1] = (0..self.y2_size).map(|y2| self.prob(x, y1, y2)).sum();
            }
        }
        ConditionalPmf::from_parts(vec![self.x_size], self.y1_size, t)
    }

    /// `P(y2 | x)`.
    pub fn wiretap_channel(&self) -> ConditionalPmf {
        let mut t = vec![0.0; self.x_size * self.y2_size];
        for x in 0..self.x_size {
            for y2 in 0..self.y2_size {
                t[x * self.y2_size + y2] = (0..self.y1_size).map(|y1| self.prob(x, y1, y2)).sum();
            }
        }
        ConditionalPmf::from_parts(vec![self.x_size], self.y2_size, t)
    }

    /// Largest violation of `P(y1,y2|x) = P(y1|x) P(y2|x)`.
    pub fn factorization_residual(&self) -> f64 {
        let m1 = self.main_channel();
        let m2 = self.wiretap_channel();
        let mut worst: f64 = 0.0;
        for x in 0..self.x_size {
            for y1 in 0..self.y1_size {
                for y2 in 0..self.y2_size {
                    let prod = m1.row(x)[y1] * m2.row(x)[y2];
                    worst = worst.max((self.prob(x, y1, y2) - prod).abs());
                }
            }
        }
        worst
    }

    pub fn factorizes(&self) -> bool {
        self.factorization_residual() <= FACTORIZATION_TOL
    }

    /// `D(y2|y1)` such that `P(y1,y2|x) = P(y1|x) D(y2|y1)` for every `x`, if one exists.
    ///
    /// Rows of `D` for `y1` values unreachable from every input are set uniform.
    pub fn joint_degrader(&self) -> Option<ConditionalPmf> {
        let m1 = self.main_channel();
        let (n1, n2) = (self.y1_size, self.y2_size);
        let mut d = vec![f64::NAN; n1 * n2];
        for y1 in 0..n1 {
            // anchor on the input that reaches y1 most strongly
            let anchor = (0..self.x_size)
                .max_by(|&a, &b| m1.row(a)[y1].total_cmp(&m1.row(b)[y1]))
                .expect("non-empty input alphabet");
            let w = m1.row(anchor)[y1];
            if w <= 0.0 {
                d[y1 * n2..(y1 + 1) * n2].fill(1.0 / n2 as f64);
                continue;
            }
            for y2 in 0..n2 {
                d[y1 * n2 + y2] = self.prob(anchor, y1, y2) / w;
            }
        }
        for x in 0..self.x_size {
            for y1 in 0..n1 {
                for y2 in 0..n2 {
                    let want = m1.row(x)[y1] * d[y1 * n2 + y2];
                    if (self.prob(x, y1, y2) - want).abs() > FACTORIZATION_TOL {
                        return None;
                    }
                }
            }
        }
        ConditionalPmf::new(vec![n1], n2, d).ok()
    }

    /// Searches for a stochastic `D` with `P(y2|x) = sum_y1 P(y1|x) D(y2|y1)`.
    pub fn degrading_matrix(&self) -> DegradingMatrix {
        let (nx, n1, n2) = (self.x_size, self.y1_size, self.y2_size);
        if nx.max(n1).max(n2) > DEGRADATION_CHECK_MAX_ALPHABET {
            return DegradingMatrix::Unchecked;
        }
        let m1 = self.main_channel();
        let m2 = self.wiretap_channel();
        let cols = n1 * n2;
        let rows = nx * n2 + n1;
        let mut a = vec![0.0; rows * cols];
        let mut b = vec![0.0; rows];
        for x in 0..nx {
            for y2 in 0..n2 {
                let r = x * n2 + y2;
                for y1 in 0..n1 {
                    a[r * cols + y1 * n2 + y2] = m1.row(x)[y1];
                }
                b[r] = m2.row(x)[y2];
            }
        }
        for y1 in 0..n1 {
            let r = nx * n2 + y1;
            for y2 in 0..n2 {
                a[r * cols + y1 * n2 + y2] = 1.0;
            }
            b[r] = 1.0;
        }
        let (_, d) = lp::phase_one(&a, &b, rows, cols);
        // residual of the extracted solution, not just the phase-one objective
        let residual = (0..rows)
            .map(|r| {
                let lhs: f64 = (0..cols).map(|c| a[r * cols + c] * d[c]).sum();
                (lhs - b[r]).abs()
            })
            .fold(0.0, f64::max);
        if residual <= DEGRADATION_TOL {
            DegradingMatrix::Found(d)
        } else {
            DegradingMatrix::Infeasible { residual }
        }
    }

    fn infer_structure(&self) -> StructureTag {
        if self.factorizes() {
            StructureTag::NonDegraded
        } else if self.joint_degrader().is_some() {
            StructureTag::PhysicallyDegraded
        } else {
            StructureTag::General
        }
    }

    fn check_tag(&self, tag: StructureTag) -> Result<()> {
        match tag {
            StructureTag::General => Ok(()),
            StructureTag::NonDegraded => {
                let r = self.factorization_residual();
                if r > FACTORIZATION_TOL {
                    return Err(ChannelError::Structure {
                        tag,
                        message: format!("P(y1,y2|x) differs from P(y1|x)P(y2|x) by {r:e}"),
                    });
                }
                Ok(())
            }
            StructureTag::PhysicallyDegraded => {
                if self.joint_degrader().is_none() {
                    return Err(ChannelError::Structure {
                        tag,
                        message: "no D(y2|y1) with P(y1,y2|x) = P(y1|x)D(y2|y1)".into(),
                    });
                }
                Ok(())
            }
        }
    }

    /// Serializes to the canonical channel JSON text.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{{");
        let _ = writeln!(s, "  \"x_size\": {},", self.x_size);
        let _ = writeln!(s, "  \"y1_size\": {},", self.y1_size);
        let _ = writeln!(s, "  \"y2_size\": {},", self.y2_size);
        let _ = writeln!(s, "  \"law\": [");
        for x in 0..self.x_size {
            let rows: Vec<String> = (0..self.y1_size)
                .map(|y1| {
                    let cells: Vec<String> =
                        (0..self.y2_size).map(|y2| decimal_literal(self.prob(x, y1, y2))).collect();
                    format!("[{}]", cells.join(", "))
                })
                .collect();
            let sep = if x + 1 < self.x_size { "," } else { "" };
            let _ = writeln!(s, "    [{}]{sep}", rows.join(", "));
        }
        let _ = writeln!(s, "  ],");
        let tag = serde_json::to_string(&self.structure).expect("tag serializes");
        let _ = writeln!(s, "  \"structure\": {tag}");
        s.push_str("}\n");
        s
    }

    /// Parses channel JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawChannel = serde_json::from_str(text).map_err(|e| ChannelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        raw.into_channel()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|source| ChannelError::Io { path: path.display().to_string(), source })
    }
}

/// Shortest round-trip decimal, zero-padded to at least 12 significant digits.
pub fn decimal_literal(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') {
        s.push('.');
    }
    let digits: usize = s
        .trim_start_matches('-')
        .trim_start_matches(['0', '.'])
        .chars()
        .filter(char::is_ascii_digit)
        .count();
    let sig = if v == 0.0 { 1 } else { digits };
    for _ in sig..12 {
        s.push('0');
    }
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    x_size: usize,
    y1_size: usize,
    y2_size: usize,
    law: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    structure: Option<StructureTag>,
}

impl RawChannel {
    fn into_channel(self) -> Result<WiretapChannel> {
        let shape_err = |field: String, message: String| ChannelError::Invariant { field, message };
        if self.x_size == 0 || self.y1_size == 0 || self.y2_size == 0 {
            return Err(shape_err("sizes".into(), "alphabet sizes must be positive".into()));
        }
        if self.law.len() != self.x_size {
            return Err(shape_err(
                "law".into(),
                format!("expected {} input slices, found {}", self.x_size, self.law.len()),
            ));
        }
        let mut table = Vec::with_capacity(self.x_size * self.y1_size * self.y2_size);
        for (x, slice) in self.law.iter().enumerate() {
            if slice.len() != self.y1_size {
                return Err(shape_err(
                    format!("law[{x}]"),
                    format!("expected {} rows, found {}", self.y1_size, slice.len()),
                ));
            }
            for (y1, row) in slice.iter().enumerate() {
                if row.len() != self.y2_size {
                    return Err(shape_err(
                        format!("law[{x}][{y1}]"),
                        format!("expected {} entries, found {}", self.y2_size, row.len()),
                    ));
                }
                for (y2, &p) in row.iter().enumerate() {
                    if !p.is_finite() || p < 0.0 {
                        return Err(shape_err(
                            format!("law[{x}][{y1}][{y2}]"),
                            format!("probability {p} is negative or not finite"),
                        ));
                    }
                }
            }
            let sum: f64 = slice.iter().flatten().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(shape_err(
                    format!("law[{x}]"),
                    format!("slice P(y1,y2|x={x}) sums to {sum}, not 1"),
                ));
            }
            table.extend(slice.iter().flatten().copied());
        }
        let law = ConditionalPmf::new(vec![self.x_size], self.y1_size * self.y2_size, table)?;
        WiretapChannel::new(self.x_size, self.y1_size, self.y2_size, law, self.structure)
    }
}

/// Reads and validates a channel JSON file.
pub fn load_channel(path: impl AsRef<Path>) -> Result<WiretapChannel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ChannelError::Io { path: path.display().to_string(), source })?;
    WiretapChannel::from_json(&text)
}

/// The binary model with independent noises; always non-degraded.
pub fn make_binary_channel(params: BinaryWiretapParams) -> WiretapChannel {
    let BinaryWiretapParams { p1, p2 } = params;
    let flip = |p: f64, same: bool| if same { 1.0 - p } else { p };
    let mut table = Vec::with_capacity(8);
    for x in 0..2 {
        for y1 in 0..2 {
            for y2 in 0..2 {
                table.push(flip(p1, y1 == x) * flip(p2, y2 == x));
            }
        }
    }
    WiretapChannel {
        x_size: 2,
        y1_size: 2,
        y2_size: 2,
        law: ConditionalPmf::from_parts(vec![2], 4, table),
        structure: StructureTag::NonDegraded,
    }
}

/// `P(y1, y2 | x) = P(y1 | x) D(y2 | y1)`.
pub fn make_degraded_channel(main: &ConditionalPmf, degrader: &ConditionalPmf) -> Result<WiretapChannel> {
    if main.input_sizes().len() != 1 || degrader.input_sizes() != [main.output_size()] {
        return Err(InfoError::DimensionMismatch(format!(
            "main {:?} -> {} does not feed degrader {:?} -> {}",
            main.input_sizes(),
            main.output_size(),
            degrader.input_sizes(),
            degrader.output_size()
        ))
        .into());
    }
    let (nx, n1, n2) = (main.num_rows(), main.output_size(), degrader.output_size());
    let mut table = Vec::with_capacity(nx * n1 * n2);
    for x in 0..nx {
        for y1 in 0..n1 {
            for y2 in 0..n2 {
                table.push(main.row(x)[y1] * degrader.row(y1)[y2]);
            }
        }
    }
    Ok(WiretapChannel {
        x_size: nx,
        y1_size: n1,
        y2_size: n2,
        law: ConditionalPmf::from_parts(vec![nx], n1 * n2, table),
        structure: StructureTag::PhysicallyDegraded,
    })
}

/// Checks the law against both structural conditions.
pub fn validate_structure(ch: &WiretapChannel) -> StructureReport {
    let factorizes = ch.factorizes();
    let joint_markov = ch.joint_degrader().is_some();
    StructureReport {
        tag: ch.structure(),
        factorizes,
        joint_markov,
        degrading: ch.degrading_matrix(),
        inferred: ch.infer_structure(),
    }
}
