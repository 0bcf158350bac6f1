//! Matrix models: moment and bimoment matrices, one- and two-matrix
//! partition functions with external coupling, HCIZ and character integrals,
//! the Gaussian two-matrix closed form and multiple-integral 2KP tau-functions.

use std::sync::Mutex;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::convolution::RhoSequence;
use crate::error::{Result, TauError};
use crate::integrate::{
    coupled_points, measure_points, mc_estimate, quad1d, McEstimate, MeasureSpec, Sampler,
    DEFAULT_GH_NODES,
};
use crate::linalg::{det_leibniz, det_with_condition, factorial, superfactorial, DetValue};
use crate::partitions::{dimension_gl, enumerate_partitions, Partition};
use crate::symfunc::{vandermonde, EigenList, FlowVector, HTable};
use crate::tau::{schur_at, stratified_sum, Provenance, SeriesValue, TauSeries, TauSeries2};

pub const MAX_MOMENT_DEGREE: usize = 40;
pub const MAX_BIMOMENT_DEGREE: usize = 30;
/// Largest `N` for tensor-product eigenvalue quadrature.
pub const MAX_EIGEN_QUAD_N: usize = 3;
/// Largest `N` for the direct multiple-integral route.
pub const MAX_DIRECT_N: usize = 2;
/// Cap on the number of point tuples summed by direct routes.
pub const MAX_TUPLES: usize = 1 << 26;

fn sign_half(n: usize) -> f64 {
    if (n * n.saturating_sub(1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_square(a: &EigenList, b: &EigenList) -> Result<usize> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(TauError::InvalidInput(format!(
            "need two spectra of equal size N >= 1, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(n)
}

fn check_length(lambda: &Partition, n: usize) -> Result<()> {
    if lambda.length() > n {
        return Err(TauError::InvalidInput(format!(
            "partition {lambda} has more than N = {n} parts"
        )));
    }
    Ok(())
}

/// Runs `body` with a fallible closure reduced to `f64`: the first error
/// seen inside is returned instead of the result.
fn capture<T>(body: impl FnOnce(&(dyn Fn(Result<f64>) -> f64 + Sync)) -> Result<T>) -> Result<T> {
    let slot: Mutex<Option<TauError>> = Mutex::new(None);
    let unwrap = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            slot.lock().unwrap().get_or_insert(e);
            f64::NAN
        }
    };
    let out = body(&unwrap);
    if let Some(e) = slot.into_inner().unwrap() {
        return Err(e);
    }
    out
}

/// Moments `m_0..m_{2D}` of a measure; `𝓜_{ij} = m_{i+j}`.
#[derive(Clone, Debug, Serialize)]
pub struct MomentMatrix {
    moments: Vec<f64>,
    errors: Vec<f64>,
    degree: usize,
    measure: String,
}

impl MomentMatrix {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn measure(&self) -> &str {
        &self.measure
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    /// Quadrature error estimate per moment.
    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn moment(&self, k: usize) -> Result<f64> {
        self.moments.get(k).copied().ok_or(TauError::IndexOverflow {
            index: k,
            max: 2 * self.degree,
        })
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        self.moment(i + j)
    }

    /// The `(D+1) × (D+1)` Hankel matrix.
    pub fn hankel(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.degree + 1, self.degree + 1, |i, j| self.moments[i + j])
    }
}

/// Moment degree that covers `pi_from_moments` for `|λ| ≤ cutoff`, `ℓ(λ) ≤ N`.
pub fn moment_degree_for(cutoff: u32, n: usize) -> usize {
    cutoff as usize + n
}

pub fn moments(m: &MeasureSpec, degree: usize) -> Result<MomentMatrix> {
    if degree > MAX_MOMENT_DEGREE {
        return Err(TauError::Capacity {
            what: "moment degree",
            value: degree,
            limit: MAX_MOMENT_DEGREE,
        });
    }
    let qs = (0..=2 * degree)
        .into_par_iter()
        .map(|k| quad1d(m, &|x| x.powi(k as i32), k))
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentMatrix {
        moments: qs.iter().map(|q| q.value).collect(),
        errors: qs.iter().map(|q| q.error).collect(),
        degree,
        measure: m.describe(),
    })
}

/// `π_{N,dμ}(λ) = ∫ Δ²(X) s_λ(X) Π dμ(x_i) = (−1)^{N(N−1)/2} N! det(m_{λ_i−i+j+N−1})`.
pub fn pi_from_moments(mm: &MomentMatrix, lambda: &Partition, n: usize) -> Result<DetValue> {
    check_length(lambda, n)?;
    if n == 0 {
        return Ok(DetValue {
            value: 1.0,
            condition: 1.0,
        });
    }
    let top = lambda.first() as usize + 2 * n - 2;
    if top > 2 * mm.degree {
        return Err(TauError::IndexOverflow {
            index: top,
            max: 2 * mm.degree,
        });
    }
    let g = DMatrix::from_fn(n, n, |i, j| {
        let k = lambda.part(i) as usize + j + n - 1 - i;
        mm.moments[k]
    });
    Ok(det_with_condition(&g).scaled(sign_half(n) * factorial(n)))
}

fn pi_table(mm: &MomentMatrix, n: usize, cutoff: u32) -> Result<Vec<(Partition, f64)>> {
    enumerate_partitions(cutoff, n)?
        .into_par_iter()
        .map(|l| {
            let v = pi_from_moments(mm, &l, n)?.value;
            Ok((l, v))
        })
        .collect()
}

/// The one-matrix tau-series `Σ π_{N,dμ}(λ) s_λ(t)` as coefficients.
pub fn moment_tau_series(mm: &MomentMatrix, n: usize, cutoff: u32) -> Result<TauSeries> {
    TauSeries::new(n as i64, cutoff, Provenance::Moments, pi_table(mm, n, cutoff)?)
}

/// `Z_N(t) = Σ_{ℓ(λ) ≤ N, |λ| ≤ cutoff} π_{N,dμ}(λ) s_λ(t)`.
pub fn z_n_series(mm: &MomentMatrix, n: usize, t: &FlowVector, cutoff: u32) -> Result<SeriesValue> {
    let h = HTable::new(t, cutoff as usize);
    let terms = pi_table(mm, n, cutoff)?
        .into_iter()
        .map(|(l, p)| (l.weight(), p * h.schur(&l)))
        .collect();
    Ok(stratified_sum(terms, cutoff))
}

/// `∫ Π_i dμ(x_i) f(x_1, …, x_N)` on a tensor grid of `nodes` per axis.
pub fn eigen_integral(
    m: &MeasureSpec,
    n: usize,
    nodes: usize,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> Result<f64> {
    if n == 0 || n > MAX_EIGEN_QUAD_N {
        return Err(TauError::Capacity {
            what: "eigenvalue quadrature N",
            value: n,
            limit: MAX_EIGEN_QUAD_N,
        });
    }
    let pts = measure_points(m, nodes);
    let p = pts.len();
    let total = p.checked_pow(n as u32).filter(|&t| t <= MAX_TUPLES).ok_or(TauError::Capacity {
        what: "quadrature tuples",
        value: usize::MAX,
        limit: MAX_TUPLES,
    })?;
    let parts: Vec<f64> = (0..p)
        .into_par_iter()
        .map(|first| {
            let mut x = vec![0.0; n];
            let mut s = 0.0;
            for rest in 0..total / p {
                let mut w = pts[first].1;
                x[0] = pts[first].0;
                let mut r = rest;
                for xi in x.iter_mut().skip(1) {
                    let (xv, wv) = pts[r % p];
                    *xi = xv;
                    w *= wv;
                    r /= p;
                }
                s += w * f(&x);
            }
            s
        })
        .collect();
    Ok(parts.iter().sum())
}

fn vandermonde_of(x: &[f64]) -> f64 {
    let mut d = 1.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            d *= x[i] - x[j];
        }
    }
    d
}

/// `Z_N(t) = ∫ Δ²(X) e^{Σ_k t_k tr X^k} Π dμ(x_i)` by tensor quadrature.
pub fn z_n_quadrature(m: &MeasureSpec, n: usize, t: &FlowVector, nodes: usize) -> Result<f64> {
    eigen_integral(m, n, nodes, &|x| {
        let v = vandermonde_of(x);
        let mut e = 0.0;
        for &xi in x {
            let mut p = 1.0;
            for k in 1..=t.order() {
                p *= xi;
                e += t.get(k) * p;
            }
        }
        v * v * e.exp()
    })
}

/// `Z_{N,ρ}(A) = (−1)^{N(N−1)/2} N!/Δ(A) · det(∫ dμ(x) x^{i−1} ρ_+(a_j x))`.
pub fn z_n_rho_det(rho: &RhoSequence, m: &MeasureSpec, a: &EigenList) -> Result<DetValue> {
    let n = a.len();
    if n == 0 {
        return Err(TauError::InvalidInput("need N >= 1 eigenvalues".into()));
    }
    a.check_distinct()?;
    let entries = capture(|un| {
        (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let aj = a.values()[j];
                quad1d(m, &|x| x.powi(i as i32) * un(rho.rho_plus_value(aj * x)), i)
                    .map(|q| q.value)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let g = DMatrix::from_row_slice(n, n, &entries);
    Ok(det_with_condition(&g).scaled(sign_half(n) * factorial(n) / vandermonde(a)))
}

/// `Σ_{ℓ(λ) ≤ N, |λ| ≤ cutoff} r_λ(N) π_{N,dμ}(λ) s_λ([A])`, with `N = |A|`.
pub fn z_n_ext_series(rho: &RhoSequence, mm: &MomentMatrix, a: &EigenList, cutoff: u32) -> Result<SeriesValue> {
    let n = a.len();
    let terms = enumerate_partitions(cutoff, n)?
        .par_iter()
        .map(|l| {
            let r = rho.r_lambda(l, n as i64)?;
            let p = pi_from_moments(mm, l, n)?.value;
            Ok((l.weight(), r * p * schur_at(l, a)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(stratified_sum(terms, cutoff))
}

/// `Z_{N,ext}(A) = (Π_{k=1}^{N−1} k!)/Δ(A) · ∫ Δ(X) det(e^{a_i x_j}) Π dμ(x_i)`.
pub fn z_n_ext_quadrature(m: &MeasureSpec, a: &EigenList, nodes: usize) -> Result<f64> {
    let n = a.len();
    a.check_distinct()?;
    let av = a.values();
    let v = eigen_integral(m, n, nodes, &|x| {
        let e = DMatrix::from_fn(n, n, |i, j| (av[i] * x[j]).exp());
        vandermonde_of(x) * det_leibniz(&e)
    })?;
    Ok(superfactorial(n - 1) * v / vandermonde(a))
}

/// `Z_{N,ext}(A)` for `e^{−σx²}`: `Z_N(0) · e^{tr A²/(4σ)}`.
pub fn z_n_ext_gaussian(sigma: f64, a: &EigenList) -> Result<f64> {
    let n = a.len();
    let mm = moments(&MeasureSpec::gauss(sigma)?, moment_degree_for(0, n))?;
    let pi0 = pi_from_moments(&mm, &Partition::empty(), n)?.value;
    let tr2: f64 = a.values().iter().map(|x| x * x).sum();
    Ok(pi0 * (tr2 / (4.0 * sigma)).exp())
}

/// `(Π_{k=1}^{N−1} k!) det(e^{a_i x_j}) / (Δ(A)Δ(X))`.
pub fn hciz_closed(a: &EigenList, x: &EigenList) -> Result<f64> {
    let n = check_square(a, x)?;
    a.check_distinct()?;
    x.check_distinct()?;
    let e = DMatrix::from_fn(n, n, |i, j| (a.values()[i] * x.values()[j]).exp());
    Ok(superfactorial(n - 1) * det_with_condition(&e).value / (vandermonde(a) * vandermonde(x)))
}

/// A Monte Carlo Haar average against its closed form.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HaarCheck {
    pub estimate: McEstimate,
    pub closed: f64,
    pub z: f64,
    /// `N = 1` integrands are constant; those compare at relative `1e-12`.
    pub exact: bool,
}

impl HaarCheck {
    fn new(estimate: McEstimate, closed: f64, n: usize) -> Self {
        HaarCheck {
            estimate,
            closed,
            z: estimate.z_score(closed),
            exact: n == 1,
        }
    }

    pub fn rel_dev(&self) -> f64 {
        (self.estimate.mean - self.closed).abs() / self.closed.abs().max(f64::MIN_POSITIVE)
    }

    pub fn passes(&self, z_max: f64) -> bool {
        if self.exact {
            self.rel_dev() <= 1e-12
        } else {
            self.z.abs() <= z_max
        }
    }
}

fn check_haar_n(n: usize) -> Result<()> {
    if n > 4 {
        return Err(TauError::Capacity {
            what: "Haar check N",
            value: n,
            limit: 4,
        });
    }
    Ok(())
}

/// `∫ e^{tr(A U X U†)} dU` by Monte Carlo against [`hciz_closed`].
pub fn hciz_check(a: &EigenList, x: &EigenList, n_samples: usize, seed: u64) -> Result<HaarCheck> {
    let closed = hciz_closed(a, x)?;
    let n = a.len();
    check_haar_n(n)?;
    let (av, xv) = (a.values(), x.values());
    let est = mc_estimate(Sampler::Haar { n }, &|u| u.conjugated_trace(av, xv).exp(), n_samples, seed)?;
    Ok(HaarCheck::new(est, closed, n))
}

/// `d_{λ,N} · E[s_λ(A U X U†)]` against `s_λ(A) s_λ(X)`.
pub fn character_integral_check(
    lambda: &Partition,
    a: &EigenList,
    x: &EigenList,
    n_samples: usize,
    seed: u64,
) -> Result<HaarCheck> {
    let n = check_square(a, x)?;
    check_haar_n(n)?;
    check_length(lambda, n)?;
    let closed = schur_at(lambda, a)? * schur_at(lambda, x)?;
    let d = dimension_gl(lambda, n as i64);
    let w = lambda.weight() as usize;
    let (av, xv) = (a.values(), x.values());
    let f = |u: &crate::integrate::HaarSample| {
        let p = u.conjugated_power_traces(av, xv, w);
        let t: Vec<f64> = p.iter().enumerate().map(|(k, pk)| pk / (k + 1) as f64).collect();
        let t = FlowVector::new(t).expect("power traces are finite");
        d * HTable::new(&t, w).schur(lambda)
    };
    let est = mc_estimate(Sampler::Haar { n }, &f, n_samples, seed)?;
    Ok(HaarCheck::new(est, closed, n))
}

/// `Σ_{ℓ(λ) ≤ N, |λ| ≤ cutoff} d_{λ,N}/(N)_λ · s_λ([M])`, which sums to `e^{tr M}`.
pub fn exp_trace_series(m: &DMatrix<f64>, cutoff: u32) -> Result<SeriesValue> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(TauError::InvalidInput("need a square non-empty matrix".into()));
    }
    let mut pow = m.clone();
    let mut t = Vec::with_capacity(cutoff as usize);
    for k in 1..=cutoff.max(1) as usize {
        if k > 1 {
            pow = &pow * m;
        }
        t.push(pow.trace() / k as f64);
    }
    let h = HTable::new(&FlowVector::new(t)?, cutoff as usize);
    let terms = enumerate_partitions(cutoff, n)?
        .into_iter()
        .map(|l| {
            let c = dimension_gl(&l, n as i64) / crate::partitions::pochhammer_ext(n as i64, &l);
            (l.weight(), c * h.schur(&l))
        })
        .collect();
    Ok(stratified_sum(terms, cutoff))
}

/// `𝓑_{ij} = ∫∫ dμ₁(x) dμ₂(y) e^{xy} x^i y^j` for `0 ≤ i, j ≤ D`.
#[derive(Clone, Debug)]
pub struct BimomentMatrix {
    entries: DMatrix<f64>,
    error: f64,
    measures: String,
}

impl BimomentMatrix {
    pub fn degree(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        let d = self.degree();
        if i > d || j > d {
            return Err(TauError::IndexOverflow { index: i.max(j), max: d });
        }
        Ok(self.entries[(i, j)])
    }

    /// Largest gap to the doubled rule over all entries.
    pub fn error(&self) -> f64 {
        self.error
    }

    pub fn measures(&self) -> &str {
        &self.measures
    }
}

fn bimoment_sum(points: &[(f64, f64, f64)], d: usize) -> DMatrix<f64> {
    let parts: Vec<DMatrix<f64>> = points
        .par_chunks(512)
        .map(|chunk| {
            let mut acc = DMatrix::zeros(d + 1, d + 1);
            let mut px = vec![0.0; d + 1];
            let mut py = vec![0.0; d + 1];
            for &(x, y, w) in chunk {
                px[0] = w;
                py[0] = 1.0;
                for k in 1..=d {
                    px[k] = px[k - 1] * x;
                    py[k] = py[k - 1] * y;
                }
                for i in 0..=d {
                    for j in 0..=d {
                        acc[(i, j)] += px[i] * py[j];
                    }
                }
            }
            acc
        })
        .collect();
    parts.into_iter().fold(DMatrix::zeros(d + 1, d + 1), |a, b| a + b)
}

pub fn bimoments(m1: &MeasureSpec, m2: &MeasureSpec, degree: usize) -> Result<BimomentMatrix> {
    if degree > MAX_BIMOMENT_DEGREE {
        return Err(TauError::Capacity {
            what: "bimoment degree",
            value: degree,
            limit: MAX_BIMOMENT_DEGREE,
        });
    }
    let nodes = DEFAULT_GH_NODES.max(degree + 1);
    let coarse = bimoment_sum(&coupled_points(m1, m2, nodes)?, degree);
    let fine = bimoment_sum(&coupled_points(m1, m2, 2 * nodes)?, degree);
    if fine.iter().any(|v| !v.is_finite()) {
        return Err(TauError::Quadrature("bimoments are not finite".into()));
    }
    let error = (&fine - &coarse).iter().fold(0.0f64, |e, v| e.max(v.abs()));
    Ok(BimomentMatrix {
        entries: fine,
        error,
        measures: format!("{} x {}", m1.describe(), m2.describe()),
    })
}

/// `B(λ, μ) = N! (Π_{k=1}^N k!) det(𝓑_{λ_i−i+N, μ_j−j+N})`.
pub fn b_from_bimoments(bm: &BimomentMatrix, lambda: &Partition, mu: &Partition, n: usize) -> Result<DetValue> {
    check_length(lambda, n)?;
    check_length(mu, n)?;
    if n == 0 {
        return Ok(DetValue {
            value: 1.0,
            condition: 1.0,
        });
    }
    let top = (lambda.first().max(mu.first()) as usize) + n - 1;
    if top > bm.degree() {
        return Err(TauError::IndexOverflow {
            index: top,
            max: bm.degree(),
        });
    }
    let g = DMatrix::from_fn(n, n, |i, j| {
        bm.entries[(lambda.part(i) as usize + n - 1 - i, mu.part(j) as usize + n - 1 - j)]
    });
    Ok(det_with_condition(&g).scaled(factorial(n) * superfactorial(n)))
}

/// Bimoment degree covering `|λ|, |μ| ≤ cutoff`, `ℓ ≤ N`.
pub fn bimoment_degree_for(cutoff: u32, n: usize) -> usize {
    cutoff as usize + n
}

/// The two-matrix tau-series `Σ B(λ, μ) s_λ(t) s_μ(u)` as coefficients.
pub fn bimoment_tau_series(bm: &BimomentMatrix, n: usize, cutoff: u32) -> Result<TauSeries2> {
    let parts = enumerate_partitions(cutoff, n)?;
    let mut coeffs = Vec::with_capacity(parts.len() * parts.len());
    for l in &parts {
        for m in &parts {
            coeffs.push(((l.clone(), m.clone()), b_from_bimoments(bm, l, m, n)?.value));
        }
    }
    TauSeries2::new(n as i64, cutoff, Provenance::Moments, coeffs)
}

/// `Σ_{λ,μ} r_λ(N) B(λ, μ) r̃_μ(N) s_λ([A]) s_μ([B])`, truncated at `|λ|, |μ| ≤ cutoff`.
pub fn z2_ext_series(
    rho: &RhoSequence,
    rho_t: &RhoSequence,
    bm: &BimomentMatrix,
    a: &EigenList,
    b: &EigenList,
    cutoff: u32,
) -> Result<SeriesValue> {
    let n = check_square(a, b)?;
    let parts = enumerate_partitions(cutoff, n)?;
    let side = |rho: &RhoSequence, e: &EigenList| -> Result<Vec<f64>> {
        parts
            .iter()
            .map(|l| Ok(rho.r_lambda(l, n as i64)? * schur_at(l, e)?))
            .collect()
    };
    let left = side(rho, a)?;
    let right = side(rho_t, b)?;
    let terms = parts
        .par_iter()
        .enumerate()
        .map(|(i, l)| {
            let mut row = Vec::with_capacity(parts.len());
            for (j, m) in parts.iter().enumerate() {
                let v = b_from_bimoments(bm, l, m, n)?.value;
                row.push((l.weight().max(m.weight()), left[i] * v * right[j]));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(stratified_sum(terms.into_iter().flatten().collect(), cutoff))
}

/// `N!/(Δ(A)Δ(B)) · det(Σ_p w_p ρ_+(a_i x_p) ρ̃_+(b_j y_p))` over weighted points.
fn gram_det(
    points: &[(f64, f64, f64)],
    rho: &RhoSequence,
    rho_t: &RhoSequence,
    a: &EigenList,
    b: &EigenList,
) -> Result<DetValue> {
    let n = check_square(a, b)?;
    a.check_distinct()?;
    b.check_distinct()?;
    let (f, g) = side_values(points, rho, rho_t, a, b)?;
    let mut gram = DMatrix::zeros(n, n);
    for (p, &(_, _, w)) in points.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] += w * f[(i, p)] * g[(j, p)];
            }
        }
    }
    Ok(det_with_condition(&gram).scaled(factorial(n) / (vandermonde(a) * vandermonde(b))))
}

/// `ρ_+(a_i x_p)` and `ρ̃_+(b_j y_p)` as `N × P` tables.
fn side_values(
    points: &[(f64, f64, f64)],
    rho: &RhoSequence,
    rho_t: &RhoSequence,
    a: &EigenList,
    b: &EigenList,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = a.len();
    let mut f = DMatrix::zeros(n, points.len());
    let mut g = DMatrix::zeros(n, points.len());
    for (p, &(x, y, _)) in points.iter().enumerate() {
        for i in 0..n {
            f[(i, p)] = rho.rho_plus_value(a.values()[i] * x)?;
            g[(i, p)] = rho_t.rho_plus_value(b.values()[i] * y)?;
        }
    }
    Ok((f, g))
}

/// `Z²_{N,ρ,ρ̃}(A, B) = N!(Π_{k=1}^N k!)/(Δ(A)Δ(B)) · det(G)` with
/// `G_ij = ∫∫ dμ₁(x) dμ₂(y) e^{xy} ρ_+(a_i x) ρ̃_+(b_j y)`.
pub fn z2_ext_det(
    rho: &RhoSequence,
    rho_t: &RhoSequence,
    m1: &MeasureSpec,
    m2: &MeasureSpec,
    a: &EigenList,
    b: &EigenList,
) -> Result<DetValue> {
    let n = check_square(a, b)?;
    let points = coupled_points(m1, m2, 2 * DEFAULT_GH_NODES)?;
    Ok(gram_det(&points, rho, rho_t, a, b)?.scaled(superfactorial(n)))
}

/// The Gaussian two-matrix model in closed form, two ways.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GaussianClosed {
    /// From completing the square: `(2π/√(4σ²−1))^N`, cross term `a_i b_j/(4σ²−1)`.
    pub rederived: f64,
    /// With the constants `(1+4σ²)^{−N/2}` and `det(e^{σ a_i b_j/(1−4σ²)})`.
    pub paper_literal: f64,
}

/// `Z²` for `dμ = e^{−σx²}` on both sides and `ρ = ρ̃ = exp`.
pub fn z2_gaussian_closed(sigma: f64, a: &EigenList, b: &EigenList) -> Result<GaussianClosed> {
    let n = check_square(a, b)?;
    let q = 4.0 * sigma * sigma - 1.0;
    if !(q > 0.0) {
        return Err(TauError::Divergence(format!("need 4 sigma^2 > 1, got sigma = {sigma}")));
    }
    a.check_distinct()?;
    b.check_distinct()?;
    let (av, bv) = (a.values(), b.values());
    let nf = n as i32;
    let pref = factorial(n) * superfactorial(n) / (vandermonde(a) * vandermonde(b));
    let quad: f64 = av.iter().chain(bv).map(|x| x * x).sum();
    let gauss = (sigma * quad / q).exp();
    let two_pi = 2.0 * std::f64::consts::PI;
    let cross = |c: f64| det_with_condition(&DMatrix::from_fn(n, n, |i, j| (c * av[i] * bv[j]).exp())).value;
    let rederived = pref * (two_pi / q.sqrt()).powi(nf) * gauss * cross(1.0 / q);
    let paper_literal = pref * two_pi.powi(nf) / (1.0 + 4.0 * sigma * sigma).powf(n as f64 / 2.0)
        * gauss
        * cross(-sigma / q);
    Ok(GaussianClosed {
        rederived,
        paper_literal,
    })
}

/// A coupled two-variable measure `dμ(x, y)`.
#[derive(Clone, Debug)]
pub enum CoupledMeasure {
    /// `Σ_p w_p δ(x − x_p) δ(y − y_p)`.
    Grid(Vec<(f64, f64, f64)>),
    /// `e^{−σx² − σ̃y² + xy} dx dy`.
    GaussPair { sigma: f64, sigma_t: f64 },
}

impl CoupledMeasure {
    /// The tensor grid `{x_k} × {y_l}` with weights `w_{kl}`.
    pub fn grid(xs: &[f64], ys: &[f64], w: &DMatrix<f64>) -> Result<Self> {
        if w.nrows() != xs.len() || w.ncols() != ys.len() || xs.is_empty() || ys.is_empty() {
            return Err(TauError::InvalidInput("grid weights must be |x| by |y|".into()));
        }
        let mut pts = Vec::with_capacity(xs.len() * ys.len());
        for (k, &x) in xs.iter().enumerate() {
            for (l, &y) in ys.iter().enumerate() {
                pts.push((x, y, w[(k, l)]));
            }
        }
        Ok(CoupledMeasure::Grid(pts))
    }

    pub fn points(&self, nodes: usize) -> Result<Vec<(f64, f64, f64)>> {
        match self {
            CoupledMeasure::Grid(p) => Ok(p.clone()),
            CoupledMeasure::GaussPair { sigma, sigma_t } => {
                coupled_points(&MeasureSpec::gauss(*sigma)?, &MeasureSpec::gauss(*sigma_t)?, nodes)
            }
        }
    }
}

/// Both routes of the multiple-integral 2KP tau-function.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MultiIntValue {
    pub det: DetValue,
    /// Present for `N ≤ 2`.
    pub direct: Option<f64>,
}

/// Nodes per axis used by the direct route on continuous measures.
pub const DIRECT_NODES: usize = 32;

/// `N!/(Δ(A)Δ(B)) · det(∫∫ dμ(x, y) ρ_+(a_i x) ρ̃_+(b_j y))`.
pub fn tau2_multi_int_det(
    mu: &CoupledMeasure,
    rho: &RhoSequence,
    rho_t: &RhoSequence,
    a: &EigenList,
    b: &EigenList,
) -> Result<DetValue> {
    gram_det(&mu.points(2 * DEFAULT_GH_NODES)?, rho, rho_t, a, b)
}

/// The `2N`-fold integral `∫ Π dμ(x_k, y_k) det(ρ_+(a_i x_k)) det(ρ̃_+(b_j y_k)) / (Δ(A)Δ(B))`
/// summed over point tuples; `N ≤ 2`.
pub fn tau2_multi_int_direct(
    mu: &CoupledMeasure,
    rho: &RhoSequence,
    rho_t: &RhoSequence,
    a: &EigenList,
    b: &EigenList,
) -> Result<f64> {
    let n = check_square(a, b)?;
    if n > MAX_DIRECT_N {
        return Err(TauError::Capacity {
            what: "direct multiple-integral N",
            value: n,
            limit: MAX_DIRECT_N,
        });
    }
    a.check_distinct()?;
    b.check_distinct()?;
    let points = mu.points(DIRECT_NODES)?;
    let (f, g) = side_values(&points, rho, rho_t, a, b)?;
    let w: Vec<f64> = points.iter().map(|p| p.2).collect();
    let sides = andreief_sides(&w, &f, &g)?;
    Ok(sides.lhs / (vandermonde(a) * vandermonde(b)))
}

/// Determinant route, plus the direct route when `N ≤ 2`.
pub fn tau2_multi_int(
    mu: &CoupledMeasure,
    rho: &RhoSequence,
    rho_t: &RhoSequence,
    a: &EigenList,
    b: &EigenList,
) -> Result<MultiIntValue> {
    let det = tau2_multi_int_det(mu, rho, rho_t, a, b)?;
    let direct = if a.len() <= MAX_DIRECT_N {
        Some(tau2_multi_int_direct(mu, rho, rho_t, a, b)?)
    } else {
        None
    };
    Ok(MultiIntValue { det, direct })
}

/// The two sides of the Andréief identity on a discrete measure.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AndreiefSides {
    /// `Σ_{p_1..p_N} Π w_{p_k} det(φ_i(p_k)) det(ψ_j(p_k))`, determinants by permutation expansion.
    pub lhs: f64,
    /// `N! det(Σ_p w_p φ_i(p) ψ_j(p))`.
    pub rhs: f64,
}

impl AndreiefSides {
    pub fn rel_dev(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(self.lhs.abs()).max(f64::MIN_POSITIVE)
    }
}

/// `phi` and `psi` are `N × P` tables of the functions at the `P` points.
pub fn andreief_sides(w: &[f64], phi: &DMatrix<f64>, psi: &DMatrix<f64>) -> Result<AndreiefSides> {
    let n = phi.nrows();
    let p = w.len();
    if n == 0 || psi.nrows() != n || phi.ncols() != p || psi.ncols() != p {
        return Err(TauError::InvalidInput("function tables must be N by P".into()));
    }
    let total = p.checked_pow(n as u32).filter(|&t| t <= MAX_TUPLES).ok_or(TauError::Capacity {
        what: "Andreief tuples",
        value: usize::MAX,
        limit: MAX_TUPLES,
    })?;
    const CHUNK: usize = 4096;
    let parts: Vec<f64> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut idx = vec![0usize; n];
            let mut fm = DMatrix::zeros(n, n);
            let mut gm = DMatrix::zeros(n, n);
            let mut acc = 0.0;
            for t in c * CHUNK..total.min((c + 1) * CHUNK) {
                let mut r = t;
                for k in idx.iter_mut() {
                    *k = r % p;
                    r /= p;
                }
                let mut weight = 1.0;
                for (k, &pk) in idx.iter().enumerate() {
                    weight *= w[pk];
                    for i in 0..n {
                        fm[(i, k)] = phi[(i, pk)];
                        gm[(i, k)] = psi[(i, pk)];
                    }
                }
                acc += weight * det_leibniz(&fm) * det_leibniz(&gm);
            }
            acc
        })
        .collect();
    let lhs = parts.iter().sum();
    let gram = DMatrix::from_fn(n, n, |i, j| (0..p).map(|k| w[k] * phi[(i, k)] * psi[(j, k)]).sum());
    Ok(AndreiefSides {
        lhs,
        rhs: factorial(n) * det_with_condition(&gram).value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn eig(v: &[f64]) -> EigenList {
        EigenList::new(v.to_vec()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn gauss1() -> MeasureSpec {
        MeasureSpec::gauss(1.0).unwrap()
    }

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn gaussian_moments() {
        let mm = moments(&gauss1(), 4).unwrap();
        let sp = PI.sqrt();
        assert!(rel(mm.moment(0).unwrap(), sp) < 1e-14);
        assert!(mm.moment(1).unwrap().abs() < 1e-14);
        assert!(rel(mm.moment(2).unwrap(), sp / 2.0) < 1e-14);
        assert!(rel(mm.moment(4).unwrap(), 3.0 * sp / 4.0) < 1e-14);
        assert_eq!(mm.entry(1, 3).unwrap(), mm.entry(2, 2).unwrap());
        assert!(matches!(mm.moment(9), Err(TauError::IndexOverflow { .. })));
        assert!(moments(&gauss1(), 41).is_err());
    }

    #[test]
    fn single_node_moments_are_one() {
        let m = MeasureSpec::table(vec![1.0], vec![1.0]).unwrap();
        let mm = moments(&m, 5).unwrap();
        assert!(mm.moments().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn pi_small_cases() {
        let mm = moments(&gauss1(), 6).unwrap();
        let e = Partition::empty();
        assert!(rel(pi_from_moments(&mm, &e, 1).unwrap().value, PI.sqrt()) < 1e-14);
        assert!(pi_from_moments(&mm, &p(&[1]), 1).unwrap().value.abs() < 1e-14);
        // ∫∫ (x − y)² e^{−x²−y²} = π
        assert!(rel(pi_from_moments(&mm, &e, 2).unwrap().value, PI) < 1e-13);
        assert!(pi_from_moments(&mm, &p(&[1, 1, 1]), 2).is_err());
        assert!(matches!(
            pi_from_moments(&mm, &p(&[12]), 2),
            Err(TauError::IndexOverflow { .. })
        ));
    }

    #[test]
    fn pi_matches_eigenvalue_quadrature() {
        let mm = moments(&gauss1(), 8).unwrap();
        for l in [p(&[2]), p(&[1, 1]), p(&[2, 2]), p(&[4, 1])] {
            let direct = eigen_integral(&gauss1(), 2, 40, &|x| {
                let v = vandermonde_of(x);
                v * v * crate::symfunc::schur_miwa(&l, &eig(x))
            })
            .unwrap();
            let got = pi_from_moments(&mm, &l, 2).unwrap().value;
            assert!((got - direct).abs() < 1e-10 * direct.abs().max(1.0), "{l}: {got} vs {direct}");
        }
    }

    #[test]
    fn z_n_series_cases() {
        let mm = moments(&gauss1(), 22).unwrap();
        let zero = FlowVector::zeros(3);
        let v = z_n_series(&mm, 2, &zero, 10).unwrap().value;
        assert!(rel(v, PI) < 1e-13);

        for t2 in [-0.1, 0.05, 0.1] {
            let t = FlowVector::new(vec![0.0, t2]).unwrap();
            let s = z_n_series(&mm, 1, &t, 40).unwrap().value;
            assert!(rel(s, (PI / (1.0 - t2)).sqrt()) < 1e-8, "t2 = {t2}");
        }

        let t = FlowVector::new(vec![0.05, -0.03, 0.01]).unwrap();
        let series = z_n_series(&mm, 2, &t, 20).unwrap().value;
        let quad = z_n_quadrature(&gauss1(), 2, &t, 60).unwrap();
        assert!(rel(series, quad) < 1e-6, "{series} vs {quad}");
        let tau = moment_tau_series(&mm, 2, 20).unwrap();
        assert_eq!(tau.provenance(), Provenance::Moments);
        assert!(rel(crate::tau::eval_kp(&tau, &t).value, series) < 1e-12);
    }

    #[test]
    fn rho_det_one_dimensional() {
        for a1 in [-0.7, 0.3, 1.1] {
            let v = z_n_rho_det(&RhoSequence::exp(), &gauss1(), &eig(&[a1])).unwrap().value;
            assert!(rel(v, PI.sqrt() * (a1 * a1 / 4.0).exp()) < 1e-12);
        }
        let one = RhoSequence::custom(-1, vec![1.0, 1.0]).unwrap();
        let v = z_n_rho_det(&one, &gauss1(), &eig(&[0.8])).unwrap().value;
        assert!(rel(v, PI.sqrt()) < 1e-14);
    }

    #[test]
    fn rho_det_matches_series() {
        let mm = moments(&gauss1(), moment_degree_for(18, 2)).unwrap();
        let a = eig(&[0.4, 0.1]);
        let det = z_n_rho_det(&RhoSequence::exp(), &gauss1(), &a).unwrap().value;
        let ser = z_n_ext_series(&RhoSequence::exp(), &mm, &a, 18).unwrap().value;
        assert!(rel(det, ser) < 1e-6, "{det} vs {ser}");
    }

    #[test]
    fn binomial_on_gaussian_is_a_domain_error() {
        let rho = RhoSequence::binomial(1.5, 0.3).unwrap();
        let err = z_n_rho_det(&rho, &gauss1(), &eig(&[0.4, 0.1])).unwrap_err();
        assert!(matches!(err, TauError::Domain { .. }), "{err:?}");
    }

    #[test]
    fn ext_series_at_zero_and_gaussian_oracle() {
        let mm = moments(&gauss1(), moment_degree_for(18, 2)).unwrap();
        let rho = RhoSequence::exp();
        let zero = eig(&[0.0, 1e-3]);
        let s0 = z_n_ext_series(&rho, &mm, &eig(&[0.0]), 6).unwrap().value;
        assert!(rel(s0, rho.c_r(1).unwrap() * PI.sqrt()) < 1e-14);
        let a = eig(&[0.5, -0.2]);
        let ser = z_n_ext_series(&rho, &mm, &a, 18).unwrap().value;
        let quad = z_n_ext_quadrature(&gauss1(), &a, 60).unwrap();
        let closed = z_n_ext_gaussian(1.0, &a).unwrap();
        assert!(rel(ser, quad) < 1e-5, "{ser} vs {quad}");
        assert!(rel(quad, closed) < 1e-10, "{quad} vs {closed}");
        assert!(z_n_ext_series(&rho, &mm, &zero, 18).unwrap().value.is_finite());
    }

    #[test]
    fn hciz_cases() {
        let c = hciz_check(&eig(&[0.8]), &eig(&[-0.4]), 200, 1).unwrap();
        assert!(c.exact && c.passes(3.0));
        assert!(rel(c.closed, (-0.32f64).exp()) < 1e-15);

        let a = eig(&[1.0, 0.2]);
        let x = eig(&[0.7, -0.3]);
        let c = hciz_check(&a, &x, 20_000, 42).unwrap();
        assert!(c.passes(3.0), "{c:?}");
        let again = hciz_check(&a, &x, 20_000, 42).unwrap();
        assert_eq!(c.estimate.mean.to_bits(), again.estimate.mean.to_bits());
    }

    #[test]
    fn character_integral_two_one() {
        let c = character_integral_check(&p(&[2, 1]), &eig(&[1.0, 0.2]), &eig(&[0.7, -0.3]), 20_000, 7)
            .unwrap();
        assert!(c.passes(3.0), "{c:?}");
        let c1 = character_integral_check(&p(&[3]), &eig(&[0.5]), &eig(&[2.0]), 200, 7).unwrap();
        assert!(c1.passes(3.0), "{c1:?}");
    }

    #[test]
    fn exp_trace_expansion() {
        let m = DMatrix::from_row_slice(2, 2, &[0.3, -0.2, 0.1, 0.25]);
        let s = exp_trace_series(&m, 16).unwrap();
        assert!(rel(s.value, m.trace().exp()) < 1e-12);
    }

    #[test]
    fn bimoment_cases() {
        let g = gauss1();
        let bm = bimoments(&g, &g, 4).unwrap();
        assert!(rel(bm.entry(0, 0).unwrap(), 2.0 * PI / 3f64.sqrt()) < 1e-13);
        for i in 0..=4 {
            for j in 0..=4 {
                let (u, v) = (bm.entry(i, j).unwrap(), bm.entry(j, i).unwrap());
                assert!((u - v).abs() <= 1e-13 * u.abs().max(1.0));
            }
        }
        let (s, u) = (0.7, -1.3);
        let t1 = MeasureSpec::table(vec![s], vec![1.0]).unwrap();
        let t2 = MeasureSpec::table(vec![u], vec![1.0]).unwrap();
        let bt = bimoments(&t1, &t2, 3).unwrap();
        for i in 0..=3 {
            for j in 0..=3 {
                let want = (s * u).exp() * s.powi(i as i32) * u.powi(j as i32);
                assert!(rel(bt.entry(i, j).unwrap(), want) < 1e-14);
            }
        }
        assert!(matches!(
            bimoments(&MeasureSpec::gauss(0.4).unwrap(), &MeasureSpec::gauss(0.4).unwrap(), 2),
            Err(TauError::Divergence(_))
        ));
    }

    #[test]
    fn gauss_table_bimoment_against_closed_form() {
        // ∫ e^{−x²} e^{x u} dx = √π e^{u²/4}
        let u = 0.9;
        let t = MeasureSpec::table(vec![u], vec![2.0]).unwrap();
        let bm = bimoments(&gauss1(), &t, 1).unwrap();
        assert!(rel(bm.entry(0, 0).unwrap(), 2.0 * PI.sqrt() * (u * u / 4.0).exp()) < 1e-13);
        assert!(rel(bm.entry(1, 0).unwrap(), u / 2.0 * bm.entry(0, 0).unwrap()) < 1e-12);
    }

    #[test]
    fn b_small_cases() {
        let bm = bimoments(&gauss1(), &gauss1(), 6).unwrap();
        let e = Partition::empty();
        assert_eq!(b_from_bimoments(&bm, &e, &e, 1).unwrap().value, bm.entry(0, 0).unwrap());
        assert_eq!(b_from_bimoments(&bm, &p(&[1]), &e, 1).unwrap().value, bm.entry(1, 0).unwrap());
        assert!(b_from_bimoments(&bm, &p(&[7]), &e, 1).is_err());
    }

    #[test]
    fn b_rows_satisfy_plucker() {
        use crate::grassmann::table_residual;
        let t1 = MeasureSpec::table(vec![-0.8, -0.1, 0.4, 0.9, 1.3], vec![0.5, 1.0, 0.7, 0.3, 0.2]).unwrap();
        let t2 = MeasureSpec::table(vec![-0.6, 0.2, 0.5, 1.1], vec![0.4, 0.9, 0.6, 0.8]).unwrap();
        let bm = bimoments(&t1, &t2, 12).unwrap();
        let n = 3;
        let mu = p(&[1]);
        let table: std::collections::BTreeMap<_, _> = enumerate_partitions(9, n)
            .unwrap()
            .into_iter()
            .map(|l| {
                let v = b_from_bimoments(&bm, &l, &mu, n).unwrap().value;
                (l, v)
            })
            .collect();
        let r = table_residual(&table, n, &[0, 1], &[2, 3, 4, 5]).unwrap();
        assert!(r.relative() < 1e-10, "{r:?}");
    }

    #[test]
    fn z2_single_node_and_gaussian() {
        let (s, u) = (0.6, -0.4);
        let t1 = MeasureSpec::table(vec![s], vec![1.0]).unwrap();
        let t2 = MeasureSpec::table(vec![u], vec![1.0]).unwrap();
        let e = RhoSequence::exp();
        let v = z2_ext_det(&e, &e, &t1, &t2, &eig(&[0.3]), &eig(&[0.2])).unwrap().value;
        assert!(rel(v, (s * u + 0.3 * s + 0.2 * u).exp()) < 1e-14);

        let (a, b) = (0.3, 0.2);
        let v = z2_ext_det(&e, &e, &gauss1(), &gauss1(), &eig(&[a]), &eig(&[b])).unwrap().value;
        let oracle = crate::integrate::quad2d_coupled(&gauss1(), &gauss1(), &|x, y| (a * x + b * y).exp())
            .unwrap()
            .value;
        assert!(rel(v, oracle) < 1e-8);
        let closed = z2_gaussian_closed(1.0, &eig(&[a]), &eig(&[b])).unwrap();
        let want = 2.0 * PI / 3f64.sqrt() * ((a * a + b * b + a * b) / 3.0).exp();
        assert!(rel(closed.rederived, want) < 1e-14);
        assert!(rel(closed.rederived, oracle) < 1e-8);
        assert!(rel(closed.paper_literal, oracle) > 1e-3);
        assert!(z2_gaussian_closed(0.4, &eig(&[a]), &eig(&[b])).is_err());
    }

    #[test]
    fn z2_two_routes_agree() {
        let e = RhoSequence::exp();
        let bm = bimoments(&gauss1(), &gauss1(), bimoment_degree_for(14, 2)).unwrap();
        let a = eig(&[0.3, -0.1]);
        let b = eig(&[0.25, 0.05]);
        let ser = z2_ext_series(&e, &e, &bm, &a, &b, 14).unwrap().value;
        let det = z2_ext_det(&e, &e, &gauss1(), &gauss1(), &a, &b).unwrap().value;
        let closed = z2_gaussian_closed(1.0, &a, &b).unwrap().rederived;
        assert!(rel(ser, det) < 1e-5, "{ser} vs {det}");
        assert!(rel(det, closed) < 1e-10, "{det} vs {closed}");
    }

    #[test]
    fn z2_series_trivial_cases() {
        let bm = bimoments(&gauss1(), &gauss1(), 8).unwrap();
        let e = RhoSequence::exp();
        let z = eig(&[0.0]);
        let v = z2_ext_series(&e, &e, &bm, &z, &z, 6).unwrap().value;
        assert!(rel(v, bm.entry(0, 0).unwrap()) < 1e-15);

        let ones = RhoSequence::ones(-3, 8).unwrap();
        let a = eig(&[0.2, -0.1]);
        let b = eig(&[0.15, 0.05]);
        let tau = bimoment_tau_series(&bm, 2, 6).unwrap();
        let ta = crate::symfunc::miwa(&a, 6);
        let tb = crate::symfunc::miwa(&b, 6);
        let via_tau = crate::tau::eval_2kp(&tau, &ta, &tb).value;
        let cr = ones.c_r(2).unwrap();
        let ser = z2_ext_series(&ones, &ones, &bm, &a, &b, 6).unwrap().value;
        assert!(rel(ser, cr * cr * via_tau) < 1e-12, "{ser} vs {via_tau}");
    }

    #[test]
    fn multi_int_grid_routes() {
        let xs = [-0.9, -0.2, 0.5, 1.2];
        let ys = [-0.7, 0.1, 0.6, 1.0];
        let w = DMatrix::from_fn(4, 4, |i, j| 0.2 + 0.1 * i as f64 + 0.05 * (i * j) as f64);
        let mu = CoupledMeasure::grid(&xs, &ys, &w).unwrap();
        let e = RhoSequence::exp();
        let bin = RhoSequence::binomial(1.5, 0.3).unwrap();
        let v = tau2_multi_int(&mu, &e, &bin, &eig(&[0.4, -0.3]), &eig(&[0.8, 0.1])).unwrap();
        let d = v.direct.unwrap();
        assert!(rel(d, v.det.value) < 1e-10, "{d} vs {:?}", v.det);

        let v1 = tau2_multi_int(&mu, &e, &e, &eig(&[0.4]), &eig(&[0.8])).unwrap();
        assert!(rel(v1.direct.unwrap(), v1.det.value) < 1e-14);
        let want: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)] * (0.4 * xs[i]).exp() * (0.8 * ys[j]).exp())
            .sum();
        assert!(rel(v1.det.value, want) < 1e-14);

        let three = tau2_multi_int_direct(&mu, &e, &e, &eig(&[0.1, 0.2, 0.3]), &eig(&[0.1, 0.2, 0.3]));
        assert!(matches!(three, Err(TauError::Capacity { .. })));
    }

    #[test]
    fn multi_int_gauss_pair_matches_z2() {
        let mu = CoupledMeasure::GaussPair {
            sigma: 1.0,
            sigma_t: 1.0,
        };
        let e = RhoSequence::exp();
        let a = eig(&[0.3, -0.1]);
        let b = eig(&[0.25, 0.05]);
        let v = tau2_multi_int(&mu, &e, &e, &a, &b).unwrap();
        let z2 = z2_ext_det(&e, &e, &gauss1(), &gauss1(), &a, &b).unwrap().value;
        assert!(rel(v.det.value * superfactorial(2), z2) < 1e-12);
        assert!(rel(v.direct.unwrap(), v.det.value) < 1e-8);
    }

    #[test]
    fn andreief_on_small_discrete_measures() {
        let pts: [f64; 6] = [-1.1, -0.4, 0.0, 0.3, 0.8, 1.5];
        let w = [0.3, 0.9, 0.5, 1.2, 0.7, 0.4];
        for n in 1..=3 {
            let phi = DMatrix::from_fn(n, 6, |i, k| pts[k].powi(i as i32) + 0.1 * i as f64);
            let psi = DMatrix::from_fn(n, 6, |j, k| ((j as f64 + 1.0) * pts[k]).exp());
            let s = andreief_sides(&w, &phi, &psi).unwrap();
            assert!(s.rel_dev() < 1e-12, "N = {n}: {s:?}");
        }
    }
}
