//! Finite-window Grassmannian frames, their Plücker coordinates and the
//! Plücker exchange relations.
//!
//! A frame of charge `N` is an `R × N` matrix whose row `r` carries the basis
//! label `r`. Rows below label 0 are the implicit identity tail, so a
//! partition with more than `N` rows has coordinate zero.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::convolution::RhoSequence;
use crate::error::{Result, TauError};
use crate::linalg::det;
use crate::partitions::{enumerate_partitions, Partition};

/// Frames with `σ_min / σ_max` below this are rejected as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Extra rows kept beyond `N + cutoff` by [`FiniteFrame::depth_for`].
pub const WINDOW_MARGIN: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteFrame {
    rows: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct FrameJson {
    charge: usize,
    rows: BTreeMap<String, Vec<f64>>,
}

impl FiniteFrame {
    /// Validates shape and numerical column rank.
    pub fn new(rows: DMatrix<f64>) -> Result<Self> {
        let frame = Self::new_unchecked(rows)?;
        let sv = frame.rows.singular_values();
        let max = sv.max();
        let min = sv.min();
        if !(max > 0.0) || min < RANK_TOL * max {
            return Err(TauError::RankDeficient {
                ratio: if max > 0.0 { min / max } else { 0.0 },
            });
        }
        Ok(frame)
    }

    /// Shape checks only; no rank guard.
    pub fn new_unchecked(rows: DMatrix<f64>) -> Result<Self> {
        let (r, n) = rows.shape();
        if n == 0 || r < n {
            return Err(TauError::InvalidInput(format!(
                "frame needs 1 <= N <= R, got R = {r}, N = {n}"
            )));
        }
        if rows.iter().any(|x| !x.is_finite()) {
            return Err(TauError::InvalidInput("non-finite frame entry".into()));
        }
        Ok(Self { rows })
    }

    /// Window depth needed for every partition up to weight `cutoff`.
    pub fn depth_for(charge: usize, cutoff: u32) -> usize {
        charge + cutoff as usize + WINDOW_MARGIN
    }

    /// The frame of `H_+^N`: row labelled `N − j` is the `j`-th unit vector.
    pub fn identity(charge: usize, depth: usize) -> Result<Self> {
        let mut rows = DMatrix::zeros(depth, charge);
        for j in 0..charge.min(depth) {
            rows[(charge - 1 - j, j)] = 1.0;
        }
        Self::new(rows)
    }

    pub fn charge(&self) -> usize {
        self.rows.ncols()
    }

    pub fn depth(&self) -> usize {
        self.rows.nrows()
    }

    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    /// Multiplies the row labelled `i` by `ρ_i`.
    pub fn scaled(&self, rho: &RhoSequence) -> Result<Self> {
        let mut rows = self.rows.clone();
        for i in 0..rows.nrows() {
            let s = rho.rho(i as i64)?;
            rows.row_mut(i).scale_mut(s);
        }
        Self::new_unchecked(rows)
    }

    fn check_label(&self, label: i64) -> Result<usize> {
        if label < 0 || label >= self.depth() as i64 {
            return Err(TauError::Label {
                label,
                lo: 0,
                hi: self.depth() as i64 - 1,
            });
        }
        Ok(label as usize)
    }

    /// Determinant of the rows with the given labels, in the given order.
    pub fn minor(&self, labels: &[i64]) -> Result<f64> {
        let n = self.charge();
        if labels.len() != n {
            return Err(TauError::InvalidInput(format!(
                "minor needs {n} labels, got {}",
                labels.len()
            )));
        }
        let idx = labels
            .iter()
            .map(|&l| self.check_label(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(det(&DMatrix::from_fn(n, n, |i, j| self.rows[(idx[i], j)])))
    }

    /// `π(λ)`: the minor on labels `λ_j − j + N`, in decreasing order.
    pub fn plucker_coord(&self, lambda: &Partition) -> Result<f64> {
        if lambda.length() > self.charge() {
            return Ok(0.0);
        }
        self.minor(&lambda.labels(self.charge())?)
    }

    /// `Σ_k (−1)^k D(A ∪ {b_k}) D(B ∖ {b_k})` for `|A| = N − 1`, `|B| = N + 1`.
    pub fn plucker_residual(&self, rows_a: &[i64], rows_b: &[i64]) -> Result<f64> {
        Ok(self.plucker_terms(rows_a, rows_b)?.residual)
    }

    /// The exchange relation with the sum of absolute terms as a scale.
    pub fn plucker_terms(&self, rows_a: &[i64], rows_b: &[i64]) -> Result<PluckerResidual> {
        exchange(self.charge(), rows_a, rows_b, |labels| self.minor(labels))
    }

    /// `{λ ↦ π(λ)}` for `|λ| ≤ cutoff`, `ℓ(λ) ≤ N`.
    pub fn coeffs(&self, cutoff: u32) -> Result<BTreeMap<Partition, f64>> {
        enumerate_partitions(cutoff, self.charge())?
            .into_iter()
            .map(|l| {
                let v = self.plucker_coord(&l)?;
                Ok((l, v))
            })
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: FrameJson = serde_json::from_str(text)?;
        let mut rows = BTreeMap::new();
        for (k, v) in raw.rows {
            let label: i64 = k
                .trim()
                .parse()
                .map_err(|e| TauError::Parse(format!("frame label {k:?}: {e}")))?;
            if label < 0 {
                return Err(TauError::Label {
                    label,
                    lo: 0,
                    hi: i64::MAX,
                });
            }
            if v.len() != raw.charge {
                return Err(TauError::Parse(format!(
                    "row {label} has {} entries, charge is {}",
                    v.len(),
                    raw.charge
                )));
            }
            rows.insert(label as usize, v);
        }
        let depth = rows.keys().next_back().map_or(0, |&l| l + 1);
        let mut m = DMatrix::zeros(depth, raw.charge);
        for (l, v) in rows {
            for (j, x) in v.into_iter().enumerate() {
                m[(l, j)] = x;
            }
        }
        Self::new(m)
    }

    pub fn to_json(&self) -> String {
        let rows = (0..self.depth())
            .map(|i| (i.to_string(), self.rows.row(i).iter().copied().collect()))
            .collect();
        serde_json::to_string(&FrameJson {
            charge: self.charge(),
            rows,
        })
        .expect("frame serialises")
    }
}

/// Convenience form of [`FiniteFrame::coeffs`].
pub fn coeffs_from_frame(frame: &FiniteFrame, cutoff: u32) -> Result<BTreeMap<Partition, f64>> {
    frame.coeffs(cutoff)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PluckerResidual {
    pub residual: f64,
    /// `Σ_k |D(A ∪ {b_k}) D(B ∖ {b_k})|`
    pub scale: f64,
}

impl PluckerResidual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual.abs()
        } else {
            self.residual.abs() / self.scale
        }
    }
}

fn exchange(
    n: usize,
    rows_a: &[i64],
    rows_b: &[i64],
    d: impl Fn(&[i64]) -> Result<f64>,
) -> Result<PluckerResidual> {
    if rows_a.len() + 1 != n || rows_b.len() != n + 1 {
        return Err(TauError::InvalidInput(format!(
            "exchange relation needs |A| = {} and |B| = {}, got {} and {}",
            n.saturating_sub(1),
            n + 1,
            rows_a.len(),
            rows_b.len()
        )));
    }
    for set in [rows_a, rows_b] {
        let mut s = set.to_vec();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(TauError::InvalidInput(format!("repeated label in {set:?}")));
        }
    }
    let mut residual = 0.0;
    let mut scale = 0.0;
    for k in 0..rows_b.len() {
        let mut left = rows_a.to_vec();
        left.push(rows_b[k]);
        let right: Vec<i64> = rows_b
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != k)
            .map(|(_, &l)| l)
            .collect();
        let term = d(&left)? * d(&right)?;
        residual += if k % 2 == 0 { term } else { -term };
        scale += term.abs();
    }
    Ok(PluckerResidual { residual, scale })
}

/// Value of the minor on `labels` reconstructed from a coefficient table:
/// the sign of the sort to decreasing order times `π(λ)`.
pub fn table_minor(coeffs: &BTreeMap<Partition, f64>, labels: &[i64]) -> Result<f64> {
    let mut sorted = labels.to_vec();
    let mut sign = 1.0;
    // insertion sort, counting transpositions
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && sorted[j - 1] < sorted[j] {
            sorted.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(0.0);
    }
    if let Some(&l) = sorted.iter().find(|&&l| l < 0) {
        return Err(TauError::Label {
            label: l,
            lo: 0,
            hi: i64::MAX,
        });
    }
    let lambda = Partition::from_labels(&sorted)?;
    coeffs
        .get(&lambda)
        .map(|v| sign * v)
        .ok_or_else(|| TauError::InvalidInput(format!("coefficient of {lambda} is not stored")))
}

/// Exchange relation evaluated on a coefficient table of charge `n`.
pub fn table_residual(
    coeffs: &BTreeMap<Partition, f64>,
    n: usize,
    rows_a: &[i64],
    rows_b: &[i64],
) -> Result<PluckerResidual> {
    exchange(n, rows_a, rows_b, |labels| table_minor(coeffs, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det_leibniz;
    use rand::{Rng, SeedableRng};
    use rand::seq::index::sample;
    use rand_chacha::ChaCha20Rng;

    fn random_frame(rng: &mut ChaCha20Rng, r: usize, n: usize) -> FiniteFrame {
        FiniteFrame::new(DMatrix::from_fn(r, n, |_, _| rng.random_range(-1.0..1.0))).unwrap()
    }

    fn labels(rng: &mut ChaCha20Rng, depth: usize, k: usize) -> Vec<i64> {
        sample(rng, depth, k).into_iter().map(|i| i as i64).collect()
    }

    #[test]
    fn identity_frame() {
        let w = FiniteFrame::identity(3, 7).unwrap();
        assert_eq!(w.plucker_coord(&Partition::empty()).unwrap(), 1.0);
        assert_eq!(w.plucker_coord(&Partition::row(1)).unwrap(), 0.0);
        let c = w.coeffs(4).unwrap();
        for (l, v) in &c {
            assert_eq!(*v, if l.is_empty() { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn integer_frame_minor() {
        let m = DMatrix::from_row_slice(
            6,
            2,
            &[1., 2., -1., 0., 3., 1., 0., 2., 2., -2., 1., 1.],
        );
        let w = FiniteFrame::new(m.clone()).unwrap();
        // λ = (1,1), N = 2: labels 2, 1
        let direct = m[(2, 0)] * m[(1, 1)] - m[(2, 1)] * m[(1, 0)];
        assert_eq!(w.plucker_coord(&Partition::new(vec![1, 1]).unwrap()).unwrap(), direct);
        assert_eq!(w.plucker_coord(&Partition::new(vec![1, 1, 1]).unwrap()).unwrap(), 0.0);
        assert!(matches!(
            w.plucker_coord(&Partition::row(5)),
            Err(TauError::Label { label: 6, .. })
        ));
    }

    #[test]
    fn three_term_relation() {
        let m = DMatrix::from_row_slice(5, 2, &[0., 0., 1., 2., 3., -1., 0., 4., 2., 5.]);
        let w = FiniteFrame::new(m).unwrap();
        let d = |a: i64, b: i64| w.minor(&[a, b]).unwrap();
        let classical = d(1, 2) * d(3, 4) - d(1, 3) * d(2, 4) + d(1, 4) * d(2, 3);
        assert_eq!(classical, 0.0);
        assert_eq!(w.plucker_residual(&[1], &[2, 3, 4]).unwrap(), 0.0);
        let id = FiniteFrame::identity(2, 5).unwrap();
        assert_eq!(id.plucker_residual(&[0], &[1, 2, 4]).unwrap(), 0.0);
    }

    #[test]
    fn random_frames_satisfy_exchange() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for n in 1..=4 {
            let w = random_frame(&mut rng, n + 6, n);
            for _ in 0..50 {
                let mut b = labels(&mut rng, w.depth(), n + 1);
                let a = labels(&mut rng, w.depth(), n - 1);
                b.rotate_left(1);
                let r = w.plucker_terms(&a, &b).unwrap();
                assert!(r.residual.abs() <= 1e-12 * r.scale.max(1e-300), "{r:?}");
            }
        }
    }

    #[test]
    fn coeffs_match_direct_minors() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let w = random_frame(&mut rng, FiniteFrame::depth_for(4, 4), 4);
        let c = coeffs_from_frame(&w, 4).unwrap();
        assert_eq!(c.len(), 12);
        for (l, v) in &c {
            let idx: Vec<usize> = l.labels(4).unwrap().iter().map(|&x| x as usize).collect();
            let sub = DMatrix::from_fn(4, 4, |i, j| w.rows()[(idx[i], j)]);
            assert!((v - det_leibniz(&sub)).abs() <= 1e-14);
        }
    }

    #[test]
    fn diagonal_scaling_ratio() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let fams = [RhoSequence::exp(), RhoSequence::binomial(1.3, 0.7).unwrap()];
        for n in 1..=4usize {
            let w = random_frame(&mut rng, FiniteFrame::depth_for(n, 8), n);
            for rho in &fams {
                let ws = w.scaled(rho).unwrap();
                let vac = w.plucker_coord(&Partition::empty()).unwrap();
                let vac_s = ws.plucker_coord(&Partition::empty()).unwrap();
                for l in enumerate_partitions(8, n).unwrap() {
                    let p = w.plucker_coord(&l).unwrap();
                    let ps = ws.plucker_coord(&l).unwrap();
                    let got = ps * vac / (vac_s * p);
                    let want: f64 = (1..=n)
                        .map(|j| {
                            let j = j as i64;
                            let n = n as i64;
                            rho.rho(l.part(j as usize - 1) as i64 - j + n).unwrap()
                                / rho.rho(n - j).unwrap()
                        })
                        .product();
                    assert!((got - want).abs() <= 1e-10 * want.abs(), "{l} N={n}");
                    // the same ratio is r_λ(N)/c_r(N)
                    let r = rho.r_lambda(&l, n as i64).unwrap() / rho.c_r(n as i64).unwrap();
                    assert!((r - want).abs() <= 1e-12 * want);
                }
            }
        }
    }

    #[test]
    fn table_residuals_vanish_before_and_after_convolution() {
        let mut rng = ChaCha20Rng::seed_from_u64(19);
        let n = 3;
        let cutoff = 6;
        let w = random_frame(&mut rng, FiniteFrame::depth_for(n, cutoff), n);
        let ws = w.scaled(&RhoSequence::binomial(2.0, 0.5).unwrap()).unwrap();
        for frame in [&w, &ws] {
            let c = frame.coeffs(cutoff).unwrap();
            let mut checked = 0;
            while checked < 100 {
                let a = labels(&mut rng, n + 4, n - 1);
                let b = labels(&mut rng, n + 4, n + 1);
                let Ok(r) = table_residual(&c, n, &a, &b) else {
                    continue;
                };
                assert!(r.relative() <= 1e-10, "{a:?} {b:?} {r:?}");
                let direct = frame.plucker_terms(&a, &b).unwrap();
                assert!((direct.residual - r.residual).abs() <= 1e-12 * r.scale.max(1e-300));
                checked += 1;
            }
        }
    }

    #[test]
    fn table_minor_signs() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let w = random_frame(&mut rng, 7, 3);
        let c = w.coeffs(4).unwrap();
        for ls in [[0, 1, 2], [3, 0, 1], [1, 4, 2], [2, 2, 0]] {
            assert!((table_minor(&c, &ls).unwrap() - w.minor(&ls).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_guard() {
        let m = DMatrix::from_fn(6, 2, |i, _| i as f64 + 1.0);
        assert!(matches!(
            FiniteFrame::new(m.clone()),
            Err(TauError::RankDeficient { .. })
        ));
        let w = FiniteFrame::new_unchecked(m).unwrap();
        for l in enumerate_partitions(4, 2).unwrap() {
            assert_eq!(w.plucker_coord(&l).unwrap(), 0.0);
        }
        assert!(FiniteFrame::new(DMatrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = FiniteFrame::identity(2, 4).unwrap();
        let back = FiniteFrame::from_json(&w.to_json()).unwrap();
        assert_eq!(back, w);
        let sparse = FiniteFrame::from_json(r#"{"charge": 1, "rows": {"0": [1.0], "3": [2.0]}}"#).unwrap();
        assert_eq!(sparse.depth(), 4);
        assert_eq!(sparse.plucker_coord(&Partition::row(3)).unwrap(), 2.0);
        assert!(FiniteFrame::from_json(r#"{"charge": 2, "rows": {"0": [1.0]}}"#).is_err());
    }
}
