//! Quadrature over weight measures, coupled two-measure integrals with the
//! `e^{xy}` kernel, Haar-random unitaries and Monte Carlo estimation.
//!
//! Random streams come from `ChaCha20Rng` (rand_chacha): a sample or batch
//! with seed `s` and stream `k` is `ChaCha20Rng::seed_from_u64(s)` with
//! `set_stream(k)`, which is identical across platforms.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::parse_kv;
use crate::error::{Result, TauError};

/// Default number of Gauss–Hermite nodes.
pub const DEFAULT_GH_NODES: usize = 80;
/// Gauss–Legendre points per panel.
pub const GL_POINTS: usize = 20;
/// Panels used by the base level of a custom-density rule.
pub const BASE_PANELS: usize = 16;
const MAX_PANELS: usize = 1 << 14;
/// Relative target of the adaptive custom-density rule.
pub const DENSITY_TOL: f64 = 1e-10;

pub const MAX_HAAR_N: usize = 8;
pub const MC_BATCH: usize = 1024;
pub const MIN_MC_SAMPLES: usize = 100;

/// Nodes and weights of a Gaussian rule.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn cached(kind: u8, n: usize, build: fn(usize) -> GaussRule) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, usize), Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&(kind, n)) {
        return r.clone();
    }
    let rule = Arc::new(build(n));
    cache.lock().unwrap().insert((kind, n), rule.clone());
    rule
}

/// `n`-point Gauss–Hermite rule for the weight `e^{−x²}`, nodes ascending.
pub fn gauss_hermite(n: usize) -> Arc<GaussRule> {
    cached(0, n, build_hermite)
}

/// `n`-point Gauss–Legendre rule on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    cached(1, n, build_legendre)
}

fn build_hermite(n: usize) -> GaussRule {
    assert!(n >= 1);
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{−1/4}
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (PIM4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    GaussRule {
        nodes: x,
        weights: w,
    }
}

fn build_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    GaussRule {
        nodes: x,
        weights: w,
    }
}

/// A density on a bounded interval, given by a closure.
#[derive(Clone)]
pub struct Density {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Density({} on [{}, {}])", self.name, self.lo, self.hi)
    }
}

impl Density {
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// The single-eigenvalue measure `dμ_0`.
#[derive(Clone, Debug)]
pub enum MeasureSpec {
    /// `e^{−σ x²} dx` on the real line.
    Gauss { sigma: f64 },
    /// `Σ_k w_k δ(x − x_k)`.
    Table { nodes: Vec<f64>, weights: Vec<f64> },
    Density(Density),
}

#[derive(Deserialize)]
struct TableJson {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl MeasureSpec {
    pub fn gauss(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(TauError::InvalidInput(format!("gauss needs sigma > 0, got {sigma}")));
        }
        Ok(MeasureSpec::Gauss { sigma })
    }

    pub fn table(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(TauError::InvalidInput(format!(
                "weight table needs matching non-empty nodes and weights ({} vs {})",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.windows(2).any(|p| !(p[0] < p[1])) || nodes.iter().any(|x| !x.is_finite()) {
            return Err(TauError::InvalidInput("table nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(TauError::InvalidInput("table weights must be positive".into()));
        }
        Ok(MeasureSpec::Table { nodes, weights })
    }

    pub fn density(
        name: impl Into<String>,
        lo: f64,
        hi: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(TauError::InvalidInput(format!(
                "density support [{lo}, {hi}] must be a bounded interval"
            )));
        }
        Ok(MeasureSpec::Density(Density {
            name: name.into(),
            lo,
            hi,
            f: Arc::new(f),
        }))
    }

    /// Parses `gauss:sigma=1` or `table:file=w.json` (`{"nodes": [..], "weights": [..]}`).
    pub fn from_spec(spec: &str, base: Option<&Path>) -> Result<Self> {
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let kv = parse_kv(args)?;
        let only = |k: &str| -> Result<&String> {
            if let Some(extra) = kv.keys().find(|x| x.as_str() != k) {
                return Err(TauError::Parse(format!("unknown measure parameter {extra:?}")));
            }
            kv.get(k)
                .ok_or_else(|| TauError::Parse(format!("measure {spec:?} is missing {k}")))
        };
        match name.trim() {
            "gauss" => {
                let s = only("sigma")?;
                Self::gauss(s.parse().map_err(|e| TauError::Parse(format!("sigma: {e}")))?)
            }
            "table" => {
                let file = Path::new(only("file")?);
                let path = match base {
                    Some(b) if file.is_relative() => b.join(file),
                    _ => file.to_path_buf(),
                };
                let t: TableJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                Self::table(t.nodes, t.weights)
            }
            other => Err(TauError::Unknown(format!("measure {other:?}"))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            MeasureSpec::Gauss { sigma } => format!("gauss(sigma={sigma})"),
            MeasureSpec::Table { nodes, .. } => format!("table({} nodes)", nodes.len()),
            MeasureSpec::Density(d) => format!("density({})", d.name),
        }
    }

    /// `∫ dμ(x) e^{c x} g(x)` at the given refinement level.
    fn tilted(&self, c: f64, g: &(dyn Fn(f64) -> f64 + Sync), level: Level) -> f64 {
        match self {
            MeasureSpec::Gauss { sigma } => {
                // e^{−σx² + cx} = e^{c²/4σ} e^{−σ(x − c/2σ)²}
                let rule = gauss_hermite(level.gh);
                let s = sigma.sqrt();
                let shift = c / (2.0 * sigma);
                let sum: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * g(x / s + shift))
                    .sum();
                (c * c / (4.0 * sigma)).exp() * sum / s
            }
            MeasureSpec::Table { nodes, weights } => nodes
                .iter()
                .zip(weights)
                .map(|(x, w)| w * (c * x).exp() * g(*x))
                .sum(),
            MeasureSpec::Density(d) => composite_legendre(d.lo, d.hi, level.panels, |x| {
                d.eval(x) * (c * x).exp() * g(x)
            }),
        }
    }
}

impl FromStr for MeasureSpec {
    type Err = TauError;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_spec(s, None)
    }
}

fn composite_legendre(lo: f64, hi: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let rule = gauss_legendre(GL_POINTS);
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        let s: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * f(mid + 0.5 * h * x))
            .sum();
        total += 0.5 * h * s;
    }
    total
}

#[derive(Clone, Copy, Debug)]
struct Level {
    gh: usize,
    panels: usize,
}

impl Level {
    fn base(gh: usize) -> Self {
        Level {
            gh,
            panels: BASE_PANELS,
        }
    }

    fn doubled(self) -> Self {
        Level {
            gh: 2 * self.gh,
            panels: 2 * self.panels,
        }
    }
}

/// A quadrature value with the difference to the refined rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

fn finite(q: Quad, what: &str) -> Result<Quad> {
    if q.value.is_finite() && q.error.is_finite() {
        Ok(q)
    } else {
        Err(TauError::Quadrature(format!("{what} produced a non-finite value")))
    }
}

/// Gauss–Hermite nodes needed for exactness up to `degree`.
pub fn gh_nodes_for(degree: usize) -> usize {
    DEFAULT_GH_NODES.max(degree / 2 + 1)
}

/// `∫ dμ(x) f(x)`.
///
/// Gauss measures use Gauss–Hermite with at least [`DEFAULT_GH_NODES`]
/// nodes (more if `degree_hint` needs them) and report the difference to the
/// doubled rule. Custom densities refine a composite Gauss–Legendre rule
/// until successive levels agree to [`DENSITY_TOL`]; if they never do, the
/// last gap is returned as the error.
pub fn quad1d(m: &MeasureSpec, f: &(dyn Fn(f64) -> f64 + Sync), degree_hint: usize) -> Result<Quad> {
    match m {
        MeasureSpec::Table { .. } => finite(
            Quad {
                value: m.tilted(0.0, f, Level::base(1)),
                error: 0.0,
            },
            "table sum",
        ),
        MeasureSpec::Gauss { .. } => {
            let lv = Level::base(gh_nodes_for(degree_hint));
            let coarse = m.tilted(0.0, f, lv);
            let fine = m.tilted(0.0, f, lv.doubled());
            finite(
                Quad {
                    value: fine,
                    error: (fine - coarse).abs(),
                },
                "Gauss-Hermite",
            )
        }
        MeasureSpec::Density(_) => {
            let mut lv = Level::base(1);
            let mut prev = m.tilted(0.0, f, lv);
            while lv.panels < MAX_PANELS {
                lv = lv.doubled();
                let next = m.tilted(0.0, f, lv);
                let err = (next - prev).abs();
                if err <= DENSITY_TOL * next.abs().max(f64::MIN_POSITIVE) || err == 0.0 {
                    return finite(Quad { value: next, error: err }, "density rule");
                }
                if lv.panels == MAX_PANELS {
                    // unsettled: the caller sees the gap as the error estimate
                    return finite(Quad { value: next, error: err }, "density rule");
                }
                prev = next;
            }
            unreachable!()
        }
    }
}

/// `∫ dμ(x) e^{c x} f(x)`; Gaussian weights absorb the tilt exactly.
pub fn quad1d_tilted(m: &MeasureSpec, c: f64, f: &(dyn Fn(f64) -> f64 + Sync)) -> Result<Quad> {
    let lv = Level::base(DEFAULT_GH_NODES);
    let coarse = m.tilted(c, f, lv);
    let fine = m.tilted(c, f, lv.doubled());
    finite(
        Quad {
            value: fine,
            error: (fine - coarse).abs(),
        },
        "tilted rule",
    )
}

fn panels_for(nodes: usize) -> usize {
    (BASE_PANELS * nodes / DEFAULT_GH_NODES).max(1)
}

/// Quadrature points `(x, w)` of `dμ`, the weight function folded into `w`.
///
/// `nodes` is the Gauss–Hermite order; custom densities scale their panel
/// count with it. Tables return their own nodes.
pub fn measure_points(m: &MeasureSpec, nodes: usize) -> Vec<(f64, f64)> {
    match m {
        MeasureSpec::Gauss { sigma } => {
            let rule = gauss_hermite(nodes);
            let s = sigma.sqrt();
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| (x / s, w / s))
                .collect()
        }
        MeasureSpec::Table { nodes, weights } => {
            nodes.iter().copied().zip(weights.iter().copied()).collect()
        }
        MeasureSpec::Density(d) => {
            let panels = panels_for(nodes);
            let rule = gauss_legendre(GL_POINTS);
            let h = (d.hi - d.lo) / panels as f64;
            let mut out = Vec::with_capacity(panels * GL_POINTS);
            for p in 0..panels {
                let mid = d.lo + (p as f64 + 0.5) * h;
                for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                    let t = mid + 0.5 * h * x;
                    out.push((t, 0.5 * h * w * d.eval(t)));
                }
            }
            out
        }
    }
}

/// Points `(x, y, w)` of `dμ₁(x) dμ₂(y) e^{xy}`, the coupling folded into `w`.
///
/// Two Gaussians are rotated onto a tensor Gauss–Hermite grid; a Gaussian
/// against any other measure completes the square around each node of the
/// other factor. Errors with [`TauError::Divergence`] when `4σσ̃ ≤ 1`.
pub fn coupled_points(m1: &MeasureSpec, m2: &MeasureSpec, nodes: usize) -> Result<Vec<(f64, f64, f64)>> {
    match (m1, m2) {
        (MeasureSpec::Gauss { sigma: s1 }, MeasureSpec::Gauss { sigma: s2 }) => {
            if 4.0 * s1 * s2 <= 1.0 {
                return Err(TauError::Divergence(format!(
                    "e^(xy) against gauss({s1}) x gauss({s2}) needs 4 sigma sigma~ > 1"
                )));
            }
            // exponent −½ vᵀQv with Q = [[2σ, −1], [−1, 2σ̃]] = L Lᵀ
            let l11 = (2.0 * s1).sqrt();
            let l21 = -1.0 / l11;
            let l22 = (2.0 * s2 - l21 * l21).sqrt();
            let rule = gauss_hermite(nodes);
            let r2 = std::f64::consts::SQRT_2;
            let scale = 2.0 / (l11 * l22);
            let mut out = Vec::with_capacity(nodes * nodes);
            for (u, wu) in rule.nodes.iter().zip(&rule.weights) {
                for (v, wv) in rule.nodes.iter().zip(&rule.weights) {
                    let y = r2 * v / l22;
                    let x = (r2 * u - l21 * y) / l11;
                    out.push((x, y, scale * wu * wv));
                }
            }
            Ok(out)
        }
        (MeasureSpec::Gauss { sigma }, other) => Ok(tilted_points(*sigma, other, nodes)),
        (other, MeasureSpec::Gauss { sigma }) => Ok(tilted_points(*sigma, other, nodes)
            .into_iter()
            .map(|(y, x, w)| (x, y, w))
            .collect()),
        _ => {
            let px = measure_points(m1, nodes);
            let py = measure_points(m2, nodes);
            let mut out = Vec::with_capacity(px.len() * py.len());
            for &(x, wx) in &px {
                for &(y, wy) in &py {
                    out.push((x, y, wx * wy * (x * y).exp()));
                }
            }
            Ok(out)
        }
    }
}

/// `(g, o, w)` for `e^{−σg²} dg · dμ(o) · e^{go}`: `e^{−σg² + og} = e^{o²/4σ} e^{−σ(g − o/2σ)²}`.
fn tilted_points(sigma: f64, other: &MeasureSpec, nodes: usize) -> Vec<(f64, f64, f64)> {
    let rule = gauss_hermite(nodes);
    let s = sigma.sqrt();
    let mut out = Vec::new();
    for (o, wo) in measure_points(other, nodes) {
        let shift = o / (2.0 * sigma);
        let gain = (o * o / (4.0 * sigma)).exp() / s;
        for (g, wg) in rule.nodes.iter().zip(&rule.weights) {
            out.push((g / s + shift, o, wo * wg * gain));
        }
    }
    out
}

fn sum_points(points: &[(f64, f64, f64)], f: &(dyn Fn(f64, f64) -> f64 + Sync)) -> f64 {
    let parts: Vec<f64> = points
        .par_chunks(256)
        .map(|c| c.iter().map(|&(x, y, w)| w * f(x, y)).sum())
        .collect();
    parts.iter().sum()
}

/// `∫∫ dμ₁(x) dμ₂(y) e^{xy} f(x, y)` on [`coupled_points`], with the
/// difference to the doubled rule as error.
pub fn quad2d_coupled(
    m1: &MeasureSpec,
    m2: &MeasureSpec,
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
) -> Result<Quad> {
    quad2d_coupled_with(m1, m2, f, DEFAULT_GH_NODES)
}

/// [`quad2d_coupled`] with an explicit base node count.
pub fn quad2d_coupled_with(
    m1: &MeasureSpec,
    m2: &MeasureSpec,
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    nodes: usize,
) -> Result<Quad> {
    let coarse = sum_points(&coupled_points(m1, m2, nodes)?, f);
    let fine = sum_points(&coupled_points(m1, m2, 2 * nodes)?, f);
    finite(
        Quad {
            value: fine,
            error: (fine - coarse).abs(),
        },
        "coupled rule",
    )
}

/// A Haar-distributed unitary matrix.
#[derive(Clone, Debug)]
pub struct HaarSample {
    u: DMatrix<Complex64>,
    pub seed: u64,
    pub stream: u64,
}

fn draw_unitary(n: usize, rng: &mut ChaCha20Rng) -> DMatrix<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            u.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    u
}

impl HaarSample {
    /// Draws from `rng`, which callers seed per stream.
    pub fn from_rng(n: usize, rng: &mut ChaCha20Rng) -> Result<Self> {
        if n == 0 || n > MAX_HAAR_N {
            return Err(TauError::Capacity {
                what: "Haar dimension",
                value: n,
                limit: MAX_HAAR_N,
            });
        }
        let u = draw_unitary(n, rng);
        Ok(HaarSample {
            u,
            seed: 0,
            stream: rng.get_stream(),
        })
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn re(&self, i: usize, j: usize) -> f64 {
        self.u[(i, j)].re
    }

    pub fn im(&self, i: usize, j: usize) -> f64 {
        self.u[(i, j)].im
    }

    /// `|U_ij|²`
    pub fn abs2(&self, i: usize, j: usize) -> f64 {
        self.u[(i, j)].norm_sqr()
    }

    /// `max |(U U†)_ij − δ_ij|`
    pub fn unitarity_error(&self) -> f64 {
        let p = &self.u * self.u.adjoint();
        let n = self.n();
        let mut err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = if i == j { 1.0 } else { 0.0 };
                err = err.max((p[(i, j)] - Complex64::new(d, 0.0)).norm());
            }
        }
        err
    }

    /// `Re tr U`
    pub fn trace_re(&self) -> f64 {
        self.u.diagonal().iter().map(|z| z.re).sum()
    }

    /// `V U`
    pub fn left_mul(&self, v: &HaarSample) -> HaarSample {
        HaarSample {
            u: &v.u * &self.u,
            seed: self.seed,
            stream: self.stream,
        }
    }

    /// `tr (A U X U†)^k` for `k = 1..=kmax`, with `A`, `X` real diagonal.
    ///
    /// These traces are real; only the real parts are returned.
    pub fn conjugated_power_traces(&self, a: &[f64], x: &[f64], kmax: usize) -> Vec<f64> {
        let n = self.n();
        assert!(a.len() == n && x.len() == n, "diagonal sizes must match N");
        let da = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { a[i] } else { 0.0 }, 0.0)
        });
        let dx = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { x[i] } else { 0.0 }, 0.0)
        });
        let m = da * &self.u * dx * self.u.adjoint();
        let mut pow = m.clone();
        let mut out = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            if k > 1 {
                pow = &pow * &m;
            }
            out.push(pow.trace().re);
        }
        out
    }

    /// `tr(A U X U†) = Σ_{ij} a_i x_j |U_ij|²`
    pub fn conjugated_trace(&self, a: &[f64], x: &[f64]) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += a[i] * x[j] * self.abs2(i, j);
            }
        }
        s
    }
}

/// The generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Haar unitary of size `n ≤ 8`, deterministic in `seed`.
pub fn haar_unitary(n: usize, seed: u64) -> Result<HaarSample> {
    let mut s = HaarSample::from_rng(n, &mut rng_for(seed, 0))?;
    s.seed = seed;
    Ok(s)
}

/// What a Monte Carlo estimator draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sampler {
    Haar { n: usize },
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    /// `(mean − target)/stderr`; zero when both the spread and the gap vanish.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if self.stderr == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY * d.signum()
            }
        } else {
            d / self.stderr
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Welford {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Welford) -> Welford {
        if o.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Welford {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }
}

/// Mean and standard error of `f` over `n_samples` draws.
///
/// Batch `b` of [`MC_BATCH`] samples uses stream `b` of `seed`; batches run
/// in parallel and are merged in batch order, so results do not depend on
/// the thread count.
pub fn mc_estimate(
    sampler: Sampler,
    f: &(dyn Fn(&HaarSample) -> f64 + Sync),
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(TauError::InvalidInput(format!(
            "Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {n_samples}"
        )));
    }
    let Sampler::Haar { n } = sampler;
    let batches = n_samples.div_ceil(MC_BATCH);
    let parts = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for(seed, b as u64);
            let count = MC_BATCH.min(n_samples - b * MC_BATCH);
            let mut w = Welford::default();
            for _ in 0..count {
                let mut s = HaarSample::from_rng(n, &mut rng)?;
                s.seed = seed;
                w.push(f(&s));
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = parts.into_iter().fold(Welford::default(), Welford::merge);
    let var = if total.n > 1.0 { total.m2 / (total.n - 1.0) } else { 0.0 };
    Ok(McEstimate {
        mean: total.mean,
        stderr: (var / total.n).sqrt(),
        samples: n_samples,
    })
}
