//! Complete symmetric functions and Schur functions.
//!
//! Schur functions are evaluated two ways: the Jacobi-Trudi determinant in the
//! flow variables `t` ([`schur_jt`]) and the bialternant ratio in eigenvalues
//! ([`schur_char`]). Power sums are never stored; `p_i = i t_i` throughout.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TauError};
use crate::linalg;
use crate::partitions::{enumerate_partitions, Partition};

/// Relative gap below which eigenvalues count as coincident.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Truncated flow parameters `(t_1, …, t_K)`; `t_i = 0` for `i > K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FlowVector(Vec<f64>);

impl FlowVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(TauError::InvalidInput(
                "flow vector needs at least one entry".into(),
            ));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite()) {
            return Err(TauError::InvalidInput(format!("non-finite flow entry {x}")));
        }
        Ok(Self(entries))
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k.max(1)])
    }

    /// Flow vector from power sums `p_i`, i.e. `t_i = p_i / i`.
    pub fn from_power_sums(p: &[f64]) -> Result<Self> {
        Self::new(
            p.iter()
                .enumerate()
                .map(|(i, &pi)| pi / (i + 1) as f64)
                .collect(),
        )
    }

    /// `t_i`, one-based; zero past the truncation order.
    pub fn get(&self, i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        self.0.get(i - 1).copied().unwrap_or(0.0)
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    /// `t_i ↦ c^i t_i`
    pub fn graded_scale(&self, c: f64) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .map(|(i, t)| t * c.powi(i as i32 + 1))
                .collect(),
        )
    }

    /// Entrywise `self − other`, padded to the longer order.
    pub fn sub(&self, other: &FlowVector) -> Self {
        let k = self.order().max(other.order());
        Self((1..=k).map(|i| self.get(i) - other.get(i)).collect())
    }

    /// `Σ_i i t_i u_i`
    pub fn pairing(&self, other: &FlowVector) -> f64 {
        (1..=self.order().min(other.order()))
            .map(|i| i as f64 * self.get(i) * other.get(i))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&t| t == 0.0)
    }
}

impl TryFrom<Vec<f64>> for FlowVector {
    type Error = TauError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FlowVector> for Vec<f64> {
    fn from(t: FlowVector) -> Self {
        t.0
    }
}

/// Eigenvalues `(a_1, …, a_N)` of a Hermitian matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EigenList(Vec<f64>);

impl EigenList {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(TauError::InvalidInput("empty eigenvalue list".into()));
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(TauError::InvalidInput(format!("non-finite eigenvalue {x}")));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Smallest pairwise distance; infinite for a single eigenvalue.
    pub fn min_gap(&self) -> f64 {
        let mut g = f64::INFINITY;
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                g = g.min((self.0[i] - self.0[j]).abs());
            }
        }
        g
    }

    /// Rejects spectra whose gap is below [`DEGENERACY_GAP`] relative to `max|a|`.
    pub fn check_distinct(&self) -> Result<()> {
        if self.len() < 2 {
            return Ok(());
        }
        let gap = self.min_gap();
        if gap <= DEGENERACY_GAP * self.max_abs() || gap == 0.0 {
            return Err(TauError::Degenerate { gap });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for EigenList {
    type Error = TauError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<EigenList> for Vec<f64> {
    fn from(a: EigenList) -> Self {
        a.0
    }
}

/// `h_0 … h_max_deg` from `exp(Σ t_i z^i) = Σ h_i z^i`, via `i h_i = Σ_k k t_k h_{i−k}`.
pub fn complete_h(t: &FlowVector, max_deg: usize) -> Vec<f64> {
    let mut h = vec![0.0; max_deg + 1];
    h[0] = 1.0;
    for i in 1..=max_deg {
        let kmax = i.min(t.order());
        let s: f64 = (1..=kmax).map(|k| k as f64 * t.get(k) * h[i - k]).sum();
        h[i] = s / i as f64;
    }
    h
}

/// Cached `h` table for repeated Jacobi-Trudi evaluations at one flow vector.
#[derive(Clone, Debug)]
pub struct HTable {
    h: Vec<f64>,
}

impl HTable {
    pub fn new(t: &FlowVector, max_deg: usize) -> Self {
        Self {
            h: complete_h(t, max_deg),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.h.len() - 1
    }

    /// `h_m`, zero for negative `m`.
    pub fn h(&self, m: i64) -> f64 {
        if m < 0 {
            0.0
        } else {
            self.h[m as usize]
        }
    }

    /// `s_λ = det(h_{λ_i − i + j})`. Needs `h` up to degree `λ_1 + ℓ(λ) − 1`.
    pub fn schur(&self, lambda: &Partition) -> f64 {
        let l = lambda.length();
        if l == 0 {
            return 1.0;
        }
        let need = lambda.first() as usize + l - 1;
        assert!(
            need <= self.max_degree(),
            "h table of degree {} too short for {lambda}",
            self.max_degree()
        );
        linalg::det_fn(l, |i, j| {
            self.h(lambda.part(i) as i64 - i as i64 + j as i64)
        })
    }
}

/// `h` degree needed by every partition of weight `≤ w`.
pub fn h_degree_for_weight(w: u32) -> usize {
    w as usize
}

/// Jacobi-Trudi Schur function `s_λ(t)`.
pub fn schur_jt(lambda: &Partition, t: &FlowVector) -> f64 {
    if lambda.is_empty() {
        return 1.0;
    }
    let need = lambda.first() as usize + lambda.length() - 1;
    HTable::new(t, need).schur(lambda)
}

/// Miwa variables `t_i = (1/i) Σ_k a_k^i`, `i = 1..=order`.
pub fn miwa(a: &EigenList, order: usize) -> FlowVector {
    let order = order.max(1);
    let mut p = vec![0.0; order];
    for &x in a.values() {
        let mut pw = 1.0;
        for pi in p.iter_mut() {
            pw *= x;
            *pi += pw;
        }
    }
    FlowVector::from_power_sums(&p).expect("finite eigenvalues give finite traces")
}

/// `Δ(a) = Π_{i<j} (a_i − a_j)`
pub fn vandermonde(a: &EigenList) -> f64 {
    let v = a.values();
    let mut d = 1.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            d *= v[i] - v[j];
        }
    }
    d
}

/// Bialternant `det(a_j^{λ_i − i + N}) / Δ(a)`.
///
/// Zero when `ℓ(λ) > N`. Rejects (nearly) coincident eigenvalues.
pub fn schur_char(lambda: &Partition, a: &EigenList) -> Result<f64> {
    if lambda.is_empty() {
        return Ok(1.0);
    }
    let n = a.len();
    if lambda.length() > n {
        return Ok(0.0);
    }
    a.check_distinct()?;
    let labels = lambda.labels(n)?;
    let v = a.values();
    let num = linalg::det(&DMatrix::from_fn(n, n, |i, j| v[j].powi(labels[i] as i32)));
    Ok(num / vandermonde(a))
}

/// Schur function at Miwa variables of `a`, routed through Jacobi-Trudi.
///
/// Valid for degenerate spectra.
pub fn schur_miwa(lambda: &Partition, a: &EigenList) -> f64 {
    if lambda.is_empty() {
        return 1.0;
    }
    let need = lambda.first() as usize + lambda.length() - 1;
    schur_jt(lambda, &miwa(a, need))
}

/// `Σ_{|λ| ≤ cutoff} s_λ(t) s_λ(u)` in enumeration order.
pub fn cauchy_littlewood_lhs(t: &FlowVector, u: &FlowVector, cutoff: u32) -> Result<f64> {
    let parts = enumerate_partitions(cutoff, cutoff as usize)?;
    let ht = HTable::new(t, h_degree_for_weight(cutoff));
    let hu = HTable::new(u, h_degree_for_weight(cutoff));
    Ok(parts.iter().map(|l| ht.schur(l) * hu.schur(l)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }
    fn t(v: &[f64]) -> FlowVector {
        FlowVector::new(v.to_vec()).unwrap()
    }
    fn e(v: &[f64]) -> EigenList {
        EigenList::new(v.to_vec()).unwrap()
    }

    #[test]
    fn complete_h_examples() {
        let h = complete_h(&t(&[1.0]), 5);
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0];
        for (a, b) in h.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(complete_h(&t(&[0.0, 1.0]), 4), vec![1.0, 0.0, 1.0, 0.0, 0.5]);
        assert_eq!(complete_h(&t(&[0.0, 0.0]), 3), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn complete_h_against_series_product() {
        // exp(t1 z) exp(t2 z^2) expanded by direct Cauchy product of the two exponentials
        let (t1, t2): (f64, f64) = (0.7, -0.3);
        let d = 8;
        let a: Vec<f64> = (0..=d).map(|k| t1.powi(k as i32) / linalg::factorial(k)).collect();
        let mut want = vec![0.0; d + 1];
        for m in 0..=d / 2 {
            let c = t2.powi(m as i32) / linalg::factorial(m);
            for k in 0..=d - 2 * m {
                want[k + 2 * m] += c * a[k];
            }
        }
        let h = complete_h(&t(&[t1, t2]), d);
        for (x, y) in h.iter().zip(want) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn schur_jt_examples() {
        let tv = t(&[0.3, -0.2, 0.5]);
        assert!((schur_jt(&p(&[1]), &tv) - 0.3).abs() < 1e-15);
        let want = 0.3f64.powi(3) / 3.0 - 0.5;
        assert!((schur_jt(&p(&[2, 1]), &tv) - want).abs() < 1e-14);
        assert!((schur_jt(&p(&[2]), &t(&[1.0, 1.0])) - 1.5).abs() < 1e-15);
        assert_eq!(schur_jt(&Partition::empty(), &tv), 1.0);
        // s_(2,1)(1,0,0) = 1/3
        assert!((schur_jt(&p(&[2, 1]), &t(&[1.0, 0.0, 0.0])) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn miwa_examples() {
        assert_eq!(miwa(&e(&[1.0, 1.0]), 2).entries(), &[2.0, 1.0]);
        let m = miwa(&e(&[2.0]), 3);
        assert!((m.get(3) - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.get(1), 2.0);
        assert_eq!(m.get(2), 2.0);
        assert_eq!(miwa(&e(&[1.0, -1.0]), 2).entries(), &[0.0, 1.0]);
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(&e(&[3.0, 2.0, 1.0])), 2.0);
        assert_eq!(vandermonde(&e(&[0.7])), 1.0);
        assert_eq!(vandermonde(&e(&[5.0, 5.0])), 0.0);
    }

    #[test]
    fn schur_char_examples() {
        let a = e(&[0.4, -1.3]);
        assert!((schur_char(&p(&[1]), &a).unwrap() - (0.4 - 1.3)).abs() < 1e-14);
        assert!((schur_char(&p(&[2, 1]), &e(&[2.0, 1.0])).unwrap() - 6.0).abs() < 1e-13);
        assert_eq!(schur_char(&Partition::empty(), &a).unwrap(), 1.0);
        assert_eq!(schur_char(&p(&[1, 1, 1]), &a).unwrap(), 0.0);
    }

    #[test]
    fn schur_char_rejects_degenerate_spectrum() {
        let err = schur_char(&p(&[1]), &e(&[1.0, 1.0 + 1e-12])).unwrap_err();
        assert!(matches!(err, TauError::Degenerate { .. }));
        // the series route is still fine
        assert!((schur_miwa(&p(&[1]), &e(&[1.0, 1.0])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn schur_char_symmetric_under_permutations() {
        let base = [0.9, -0.35, 0.2];
        let lams = [p(&[1]), p(&[2, 1]), p(&[3, 1, 1]), p(&[2, 2])];
        for l in &lams {
            let reference = schur_char(l, &e(&base)).unwrap();
            for (perm, _) in linalg::permutations(3) {
                let v: Vec<f64> = perm.iter().map(|&i| base[i]).collect();
                let s = schur_char(l, &e(&v)).unwrap();
                assert!((s - reference).abs() <= 1e-13 * (1.0 + reference.abs()), "{l}");
            }
        }
    }

    #[test]
    fn cauchy_littlewood_examples() {
        let z = FlowVector::zeros(3);
        assert_eq!(cauchy_littlewood_lhs(&z, &z, 7).unwrap(), 1.0);
        let x = t(&[0.1]);
        let v = cauchy_littlewood_lhs(&x, &x, 10).unwrap();
        assert!((v - 0.01f64.exp()).abs() < 1e-12);
        let v = cauchy_littlewood_lhs(&t(&[0.2]), &t(&[0.0, 0.3]), 12).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    fn distinct_eigs(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0f64..1.0, n).prop_filter("gap", |v| {
            EigenList::new(v.clone()).unwrap().min_gap() >= 0.05
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn two_routes_agree(v in (2usize..=4).prop_flat_map(distinct_eigs), w in 0u32..=8) {
            let a = EigenList::new(v).unwrap();
            for l in enumerate_partitions(w, a.len()).unwrap().iter().filter(|l| l.weight() == w) {
                let c = schur_char(l, &a).unwrap();
                let j = schur_jt(l, &miwa(&a, w as usize + a.len()));
                prop_assert!((c - j).abs() <= 1e-9 * (1.0 + c.abs()), "{} {} {}", l, c, j);
            }
        }

        #[test]
        fn grading(v in proptest::collection::vec(-1.0f64..1.0, 4), c in 0.2f64..2.0, w in 1u32..7) {
            let scale = (c.max(1.0) * (1.0 + v.iter().map(|x| x.abs()).sum::<f64>())).powi(w as i32);
            let tv = FlowVector::new(v).unwrap();
            for l in enumerate_partitions(w, 7).unwrap().iter().filter(|l| l.weight() == w) {
                let lhs = schur_jt(l, &tv.graded_scale(c));
                let rhs = c.powi(w as i32) * schur_jt(l, &tv);
                prop_assert!((lhs - rhs).abs() <= 1e-13 * scale);
            }
        }

        #[test]
        fn cauchy_littlewood_small_flows(x in proptest::collection::vec(-0.1f64..0.1, 1..=2), y in proptest::collection::vec(-0.1f64..0.1, 1..=2)) {
            let (tx, ty) = (FlowVector::new(x).unwrap(), FlowVector::new(y).unwrap());
            let lhs = cauchy_littlewood_lhs(&tx, &ty, 10).unwrap();
            prop_assert!((lhs - tx.pairing(&ty).exp()).abs() <= 1e-8);
        }

        #[test]
        fn cauchy_littlewood_truncation_is_graded(x in proptest::collection::vec(-0.1f64..0.1, 3), y in proptest::collection::vec(-0.1f64..0.1, 3), cutoff in 2u32..=10) {
            // truncating at weight w keeps exactly the q^0..q^w coefficients of exp(Σ i t_i u_i q^i)
            let (tx, ty) = (FlowVector::new(x).unwrap(), FlowVector::new(y).unwrap());
            let lhs = cauchy_littlewood_lhs(&tx, &ty, cutoff).unwrap();
            let coupled = FlowVector::new((1..=3).map(|i| i as f64 * tx.get(i) * ty.get(i)).collect()).unwrap();
            let kept: f64 = complete_h(&coupled, cutoff as usize).iter().sum();
            prop_assert!((lhs - kept).abs() <= 1e-14);
        }
    }
}
