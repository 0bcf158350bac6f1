//! Truncated tau-series for KP-Toda and 2KP-Toda, the convolution action on
//! their coefficients, hypergeometric tau-functions and the Baker–Akhiezer
//! function.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::RhoSequence;
use crate::error::{Result, TauError};
use crate::grassmann::FiniteFrame;
use crate::linalg::{det_with_condition, DetValue};
use crate::partitions::{enumerate_partitions, Partition};
use crate::symfunc::{schur_char, schur_miwa, vandermonde, EigenList, FlowVector, HTable};

/// Coefficients smaller than this in magnitude are dropped.
pub const PRUNE_BELOW: f64 = 1e-300;

/// A hypergeometric series is flagged when its top stratum exceeds this
/// fraction of the total.
pub const CONVERGENCE_WARN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Frame,
    Moments,
    #[default]
    Manual,
}

fn check_value(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(TauError::InvalidInput(format!("non-finite coefficient {v}")))
    }
}

fn check_partition(l: &Partition, charge: i64, cutoff: u32, provenance: Provenance) -> Result<()> {
    if l.weight() > cutoff {
        return Err(TauError::InvalidInput(format!(
            "{l} has weight {} above the cutoff {cutoff}",
            l.weight()
        )));
    }
    if provenance != Provenance::Manual && l.length() as i64 > charge.max(0) {
        return Err(TauError::InvalidInput(format!(
            "{l} is longer than the charge {charge}"
        )));
    }
    Ok(())
}

/// `τ(N, t) = Σ_λ π_N(λ) s_λ(t)` truncated at `|λ| ≤ cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauSeries {
    charge: i64,
    cutoff: u32,
    provenance: Provenance,
    coeffs: BTreeMap<Partition, f64>,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    lambda: Partition,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    charge: i64,
    cutoff: u32,
    #[serde(default)]
    provenance: Provenance,
    coeffs: Vec<Entry>,
}

/// Value of a truncated sum and the magnitude of its largest-weight stratum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub top_stratum: f64,
}

impl SeriesValue {
    /// `top_stratum / |value|`, infinite when the value vanishes.
    pub fn relative_tail(&self) -> f64 {
        if self.value == 0.0 {
            if self.top_stratum == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.top_stratum / self.value.abs()
        }
    }

    pub fn converged(&self) -> bool {
        self.relative_tail() <= CONVERGENCE_WARN
    }
}

pub(crate) fn stratified_sum(terms: Vec<(u32, f64)>, cutoff: u32) -> SeriesValue {
    let mut value = 0.0;
    let mut top = 0.0;
    for (w, v) in terms {
        value += v;
        if w == cutoff {
            top += v;
        }
    }
    SeriesValue {
        value,
        top_stratum: f64::abs(top),
    }
}

impl TauSeries {
    pub fn new(
        charge: i64,
        cutoff: u32,
        provenance: Provenance,
        coeffs: impl IntoIterator<Item = (Partition, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (l, v) in coeffs {
            check_value(v)?;
            check_partition(&l, charge, cutoff, provenance)?;
            if v.abs() >= PRUNE_BELOW {
                map.insert(l, v);
            }
        }
        Ok(Self {
            charge,
            cutoff,
            provenance,
            coeffs: map,
        })
    }

    /// `{(): 1}`
    pub fn vacuum(charge: i64, cutoff: u32) -> Self {
        Self::new(charge, cutoff, Provenance::Manual, [(Partition::empty(), 1.0)])
            .expect("vacuum series is valid")
    }

    pub fn from_frame(frame: &FiniteFrame, cutoff: u32) -> Result<Self> {
        Self::new(
            frame.charge() as i64,
            cutoff,
            Provenance::Frame,
            frame.coeffs(cutoff)?,
        )
    }

    pub fn charge(&self) -> i64 {
        self.charge
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn coeffs(&self) -> &BTreeMap<Partition, f64> {
        &self.coeffs
    }

    /// `π(λ)`, zero when not stored.
    pub fn get(&self, lambda: &Partition) -> f64 {
        self.coeffs.get(lambda).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeriesJson {
            charge: self.charge,
            cutoff: self.cutoff,
            provenance: self.provenance,
            coeffs: self
                .coeffs
                .iter()
                .map(|(l, &v)| Entry {
                    lambda: l.clone(),
                    value: v,
                })
                .collect(),
        })
        .expect("series serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SeriesJson = serde_json::from_str(text)?;
        let mut seen = BTreeMap::new();
        for e in raw.coeffs {
            if seen.insert(e.lambda.clone(), e.value).is_some() {
                return Err(TauError::Parse(format!("duplicate coefficient for {}", e.lambda)));
            }
        }
        Self::new(raw.charge, raw.cutoff, raw.provenance, seen)
    }
}

/// `Σ_λ π(λ) s_λ(t)` in graded order, with the top-weight stratum reported.
pub fn eval_kp(tau: &TauSeries, t: &FlowVector) -> SeriesValue {
    let h = HTable::new(t, tau.cutoff as usize);
    let entries: Vec<(&Partition, &f64)> = tau.coeffs.iter().collect();
    let terms = entries
        .par_iter()
        .map(|(l, &v)| (l.weight(), v * h.schur(l)))
        .collect();
    stratified_sum(terms, tau.cutoff)
}

/// Coefficient-wise `π(λ) ↦ r_λ(N) π(λ)`.
pub fn apply_conv(rho: &RhoSequence, tau: &TauSeries) -> Result<TauSeries> {
    let coeffs = tau
        .coeffs
        .iter()
        .map(|(l, &v)| Ok((l.clone(), rho.scale_coefficient(l, tau.charge, v)?)))
        .collect::<Result<Vec<_>>>()?;
    TauSeries::new(tau.charge, tau.cutoff, tau.provenance, coeffs)
}

/// `τ(N, t, t̃) = Σ_{λ,μ} B_N(λ, μ) s_λ(t) s_μ(t̃)` truncated on both weights.
#[derive(Clone, Debug, PartialEq)]
pub struct TauSeries2 {
    charge: i64,
    cutoff: u32,
    provenance: Provenance,
    coeffs: BTreeMap<(Partition, Partition), f64>,
}

#[derive(Serialize, Deserialize)]
struct Entry2 {
    lambda: Partition,
    mu: Partition,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct Series2Json {
    charge: i64,
    cutoff: u32,
    #[serde(default)]
    provenance: Provenance,
    coeffs: Vec<Entry2>,
}

impl TauSeries2 {
    pub fn new(
        charge: i64,
        cutoff: u32,
        provenance: Provenance,
        coeffs: impl IntoIterator<Item = ((Partition, Partition), f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((l, m), v) in coeffs {
            check_value(v)?;
            check_partition(&l, charge, cutoff, provenance)?;
            check_partition(&m, charge, cutoff, provenance)?;
            if v.abs() >= PRUNE_BELOW {
                map.insert((l, m), v);
            }
        }
        Ok(Self {
            charge,
            cutoff,
            provenance,
            coeffs: map,
        })
    }

    /// `B(λ, μ) = δ_{λμ}` for `|λ| ≤ cutoff`, `ℓ(λ) ≤ max_length`.
    pub fn diagonal(charge: i64, cutoff: u32, max_length: usize) -> Result<Self> {
        let parts = enumerate_partitions(cutoff, max_length)?;
        Self::new(
            charge,
            cutoff,
            Provenance::Manual,
            parts.into_iter().map(|l| ((l.clone(), l), 1.0)),
        )
    }

    pub fn charge(&self) -> i64 {
        self.charge
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn coeffs(&self) -> &BTreeMap<(Partition, Partition), f64> {
        &self.coeffs
    }

    pub fn get(&self, lambda: &Partition, mu: &Partition) -> f64 {
        self.coeffs
            .get(&(lambda.clone(), mu.clone()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&Series2Json {
            charge: self.charge,
            cutoff: self.cutoff,
            provenance: self.provenance,
            coeffs: self
                .coeffs
                .iter()
                .map(|((l, m), &v)| Entry2 {
                    lambda: l.clone(),
                    mu: m.clone(),
                    value: v,
                })
                .collect(),
        })
        .expect("series serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Series2Json = serde_json::from_str(text)?;
        let mut seen = BTreeMap::new();
        for e in raw.coeffs {
            let key = (e.lambda, e.mu);
            if seen.contains_key(&key) {
                return Err(TauError::Parse(format!(
                    "duplicate coefficient for ({}; {})",
                    key.0, key.1
                )));
            }
            seen.insert(key, e.value);
        }
        Self::new(raw.charge, raw.cutoff, raw.provenance, seen)
    }
}

/// `Σ_{λ,μ} B(λ, μ) s_λ(t) s_μ(u)`; the top stratum collects `max(|λ|, |μ|) = cutoff`.
pub fn eval_2kp(tau: &TauSeries2, t: &FlowVector, u: &FlowVector) -> SeriesValue {
    let ht = HTable::new(t, tau.cutoff as usize);
    let hu = HTable::new(u, tau.cutoff as usize);
    let entries: Vec<(&(Partition, Partition), &f64)> = tau.coeffs.iter().collect();
    let terms = entries
        .par_iter()
        .map(|((l, m), &v)| (l.weight().max(m.weight()), v * ht.schur(l) * hu.schur(m)))
        .collect();
    stratified_sum(terms, tau.cutoff)
}

/// `B(λ, μ) ↦ r_λ(N) B(λ, μ) r̃_μ(N)`.
pub fn apply_conv2(rho: &RhoSequence, rho_t: &RhoSequence, tau: &TauSeries2) -> Result<TauSeries2> {
    let n = tau.charge;
    let coeffs = tau
        .coeffs
        .iter()
        .map(|((l, m), &v)| {
            let v = rho.scale_coefficient(l, n, v)?;
            Ok(((l.clone(), m.clone()), rho_t.scale_coefficient(m, n, v)?))
        })
        .collect::<Result<Vec<_>>>()?;
    TauSeries2::new(n, tau.cutoff, tau.provenance, coeffs)
}

pub(crate) fn schur_at(lambda: &Partition, a: &EigenList) -> Result<f64> {
    match schur_char(lambda, a) {
        Err(TauError::Degenerate { .. }) => Ok(schur_miwa(lambda, a)),
        other => other,
    }
}

/// `τ_r(N, [A], [B]) = Σ_{ℓ(λ) ≤ N, |λ| ≤ cutoff} r_λ(N) s_λ(A) s_λ(B)`.
///
/// Falls back to the Jacobi–Trudi route when a spectrum is degenerate.
/// The result is flagged unconverged when the top stratum exceeds
/// [`CONVERGENCE_WARN`] of the total.
pub fn tau_hypergeom_series(
    rho: &RhoSequence,
    n: i64,
    a: &EigenList,
    b: &EigenList,
    cutoff: u32,
) -> Result<SeriesValue> {
    let parts = enumerate_partitions(cutoff, n.max(0) as usize)?;
    let terms = parts
        .par_iter()
        .map(|l| {
            let r = rho.r_lambda(l, n)?;
            Ok((l.weight(), r * schur_at(l, a)? * schur_at(l, b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(stratified_sum(terms, cutoff))
}

/// `det(ρ_+(a_i b_j)) / (Δ(A) Δ(B))` with the condition estimate of the matrix.
pub fn tau_hypergeom_det(rho: &RhoSequence, a: &EigenList, b: &EigenList) -> Result<DetValue> {
    let n = a.len();
    if b.len() != n || n == 0 {
        return Err(TauError::InvalidInput(format!(
            "need |A| = |B| = N >= 1, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    a.check_distinct()?;
    b.check_distinct()?;
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = rho.rho_plus_value(a.values()[i] * b.values()[j])?;
        }
    }
    Ok(det_with_condition(&m).scaled(1.0 / (vandermonde(a) * vandermonde(b))))
}

/// Miwa shift `[z^{−1}]` subtracted from the flows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MiwaShift {
    /// `t_i − 1/(i z^i)`
    #[default]
    Standard,
    /// `t_i − i/z^i`, as the sequence `(z^{−1}, 2z^{−2}, 3z^{−3}, …)` reads literally.
    PaperLiteral,
}

impl MiwaShift {
    pub fn name(self) -> &'static str {
        match self {
            MiwaShift::Standard => "standard",
            MiwaShift::PaperLiteral => "paper-literal",
        }
    }

    fn entry(self, i: usize, z: f64) -> f64 {
        let zi = z.powi(-(i as i32));
        match self {
            MiwaShift::Standard => zi / i as f64,
            MiwaShift::PaperLiteral => i as f64 * zi,
        }
    }
}

impl std::str::FromStr for MiwaShift {
    type Err = TauError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(MiwaShift::Standard),
            "paper-literal" => Ok(MiwaShift::PaperLiteral),
            other => Err(TauError::Unknown(format!("Miwa convention {other:?}"))),
        }
    }
}

/// `Ψ_N(z, t) = e^{Σ t_i z^i} τ(N, t − [z^{−1}]) / τ(N, t)`.
///
/// The shift is kept up to degree `max(K, cutoff)`; higher degrees cannot
/// reach a stored coefficient.
pub fn baker_akhiezer(tau: &TauSeries, z: f64, t: &FlowVector, shift: MiwaShift) -> Result<f64> {
    if !(z.abs() > 1.0) {
        return Err(TauError::InvalidInput(format!(
            "Baker-Akhiezer needs |z| > 1, got {z}"
        )));
    }
    let k = t.order().max(tau.cutoff as usize).max(1);
    let shifted = FlowVector::new((1..=k).map(|i| t.get(i) - shift.entry(i, z)).collect())?;
    let den = eval_kp(tau, t).value;
    if den == 0.0 {
        return Err(TauError::ZeroDenominator("tau(N, t)"));
    }
    let phase: f64 = (1..=t.order()).map(|i| t.get(i) * z.powi(i as i32)).sum();
    Ok(phase.exp() * eval_kp(tau, &shifted).value / den)
}
