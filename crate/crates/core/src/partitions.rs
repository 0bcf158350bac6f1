//! Integer partitions and the combinatorial scalars attached to them.
//!
//! A [`Partition`] is stored as its dense list of positive parts. Partitions
//! are totally ordered by weight first and then reverse-lexicographically on
//! the parts, which is the order [`enumerate_partitions`] produces. Every
//! partition-indexed table in the crate iterates in this order so that sums
//! reduce identically from run to run.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TauError};

/// Soft guard on the weight passed to [`enumerate_partitions`].
pub const MAX_ENUM_WEIGHT: u32 = 40;

/// Weakly decreasing list of positive integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

/// Frobenius coordinates `(alpha | beta)`: arm and leg lengths along the diagonal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrobeniusCoords {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl FrobeniusCoords {
    pub fn rank(&self) -> usize {
        self.alpha.len()
    }
}

impl Partition {
    /// Builds a partition, dropping trailing zeros. Parts must be weakly decreasing.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.contains(&0) {
            return Err(TauError::InvalidPartition(format!(
                "zero part in the interior of {parts:?}"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(TauError::InvalidPartition(format!(
                "parts {parts:?} are not weakly decreasing"
            )));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// Single-row partition `(k)`; `k = 0` gives the empty partition.
    pub fn row(k: u32) -> Self {
        if k == 0 {
            Self::empty()
        } else {
            Self { parts: vec![k] }
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `|λ|`
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// `ℓ(λ)`
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// Zero-based part access, padded with zeros past the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn first(&self) -> u32 {
        self.part(0)
    }

    /// Transpose of the Young diagram.
    pub fn conjugate(&self) -> Partition {
        let cols = self.first() as usize;
        let parts = (1..=cols)
            .map(|j| self.parts.iter().filter(|&&p| p as usize >= j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// Cells `(i, j)` of the diagram, both one-based, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p as usize).map(move |j| (i + 1, j)))
    }

    /// Hook length of the one-based cell `(i, j)`.
    pub fn hook(&self, i: usize, j: usize) -> u32 {
        let arm = self.part(i - 1) as usize - j;
        let leg = self.parts[i..]
            .iter()
            .take_while(|&&p| p as usize >= j)
            .count();
        (arm + leg + 1) as u32
    }

    pub fn to_frobenius(&self) -> FrobeniusCoords {
        let conj = self.conjugate();
        let k = self
            .parts
            .iter()
            .enumerate()
            .take_while(|(i, &p)| p as usize > *i)
            .count();
        FrobeniusCoords {
            alpha: (0..k).map(|i| self.parts[i] - i as u32 - 1).collect(),
            beta: (0..k).map(|i| conj.parts[i] - i as u32 - 1).collect(),
        }
    }

    /// Inverse of [`Partition::to_frobenius`].
    pub fn from_frobenius(f: &FrobeniusCoords) -> Result<Partition> {
        let k = f.alpha.len();
        if f.beta.len() != k {
            return Err(TauError::InvalidPartition(
                "alpha and beta have different lengths".into(),
            ));
        }
        let strictly_decreasing = |v: &[u32]| v.windows(2).all(|w| w[0] > w[1]);
        if !strictly_decreasing(&f.alpha) || !strictly_decreasing(&f.beta) {
            return Err(TauError::InvalidPartition(
                "Frobenius coordinates must be strictly decreasing".into(),
            ));
        }
        if k == 0 {
            return Ok(Partition::empty());
        }
        // Rows 1..=k come from the arms; a row r > k has one cell in every
        // diagonal column c whose leg reaches it (c + β_c ≥ r).
        let len = 1 + f.beta[0] as usize;
        let parts = (1..=len.max(k))
            .map(|r| {
                if r <= k {
                    f.alpha[r - 1] + r as u32
                } else {
                    f.beta
                        .iter()
                        .enumerate()
                        .filter(|(c, &b)| c + 1 + b as usize >= r)
                        .count() as u32
                }
            })
            .collect();
        Partition::new(parts)
    }

    /// Row labels `λ_j − j + N` for `j = 1..=N`, strictly decreasing.
    ///
    /// Fails when `ℓ(λ) > N`, since those rows fall outside the charge-`N` window.
    pub fn labels(&self, charge: usize) -> Result<Vec<i64>> {
        if self.length() > charge {
            return Err(TauError::InvalidPartition(format!(
                "{self} has length {} > N = {charge}",
                self.length()
            )));
        }
        Ok((1..=charge)
            .map(|j| self.part(j - 1) as i64 - j as i64 + charge as i64)
            .collect())
    }

    /// Partition whose label set (any order, distinct, nonnegative) is `labels`.
    pub fn from_labels(labels: &[i64]) -> Result<Partition> {
        let n = labels.len();
        let mut sorted = labels.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(TauError::InvalidPartition(format!(
                "repeated label in {labels:?}"
            )));
        }
        if sorted.last().is_some_and(|&l| l < 0) {
            return Err(TauError::InvalidPartition(format!(
                "negative label in {labels:?}"
            )));
        }
        let parts = sorted
            .iter()
            .enumerate()
            .map(|(j, &l)| (l - n as i64 + j as i64 + 1) as u32)
            .collect();
        Partition::new(parts)
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = TauError;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// Comma-separated parts, `()` for the trivial partition.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("()");
        }
        let s: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for Partition {
    type Err = TauError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s)
            .trim();
        if inner.is_empty() || inner == "0" {
            return Ok(Partition::empty());
        }
        let parts = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|e| TauError::Parse(format!("partition part {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// All partitions with `|λ| ≤ max_weight` and `ℓ(λ) ≤ max_length`, graded by
/// weight and reverse-lexicographic within a weight.
pub fn enumerate_partitions(max_weight: u32, max_length: usize) -> Result<Vec<Partition>> {
    if max_weight > MAX_ENUM_WEIGHT {
        return Err(TauError::Capacity {
            what: "max_weight",
            value: max_weight as usize,
            limit: MAX_ENUM_WEIGHT as usize,
        });
    }
    let mut out = vec![Partition::empty()];
    let mut buf = Vec::new();
    for w in 1..=max_weight {
        fill(w, w, max_length, &mut buf, &mut out);
    }
    Ok(out)
}

/// Partitions of `n` with largest part `≤ max_part`, descending lex order.
fn fill(n: u32, max_part: u32, max_len: usize, buf: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if n == 0 {
        out.push(Partition { parts: buf.clone() });
        return;
    }
    if buf.len() == max_len {
        return;
    }
    for p in (1..=max_part.min(n)).rev() {
        // remaining rows cannot absorb the rest
        if (p as usize) * (max_len - buf.len()) < n as usize {
            break;
        }
        buf.push(p);
        fill(n - p, p, max_len, buf, out);
        buf.pop();
    }
}

/// Extended Pochhammer symbol `(N)_λ = Π_{(i,j)∈λ} (N − i + j)`.
pub fn pochhammer_ext(n: i64, lambda: &Partition) -> f64 {
    lambda
        .cells()
        .map(|(i, j)| (n - i as i64 + j as i64) as f64)
        .product()
}

/// Dimension of the irreducible `GL(N)` representation `λ` by the hook-content formula.
pub fn dimension_gl(lambda: &Partition, n: i64) -> f64 {
    if lambda.length() as i64 > n {
        return 0.0;
    }
    lambda
        .cells()
        .map(|(i, j)| (n + j as i64 - i as i64) as f64 / lambda.hook(i, j) as f64)
        .product()
}
