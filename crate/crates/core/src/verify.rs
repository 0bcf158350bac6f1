//! Named verification suites. Each returns one [`Report`] per checked
//! quantity; a suite passes when all of its reports do.
//!
//! Suites draw their random instances from `ChaCha20Rng` with the run seed
//! and a per-suite stream, so reports are reproducible byte for byte.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::convolution::{rho_product, RhoSequence};
use crate::error::{Result, TauError};
use crate::grassmann::{table_residual, FiniteFrame};
use crate::integrate::{quad2d_coupled, rng_for, MeasureSpec};
use crate::linalg::superfactorial;
use crate::matmodels::{
    andreief_sides, bimoment_degree_for, bimoments, character_integral_check, hciz_check, moment_degree_for,
    moments, tau2_multi_int, z2_ext_det, z2_ext_series, z2_gaussian_closed, z_n_ext_quadrature, z_n_ext_series,
    z_n_rho_det, CoupledMeasure,
};
use crate::partitions::{enumerate_partitions, pochhammer_ext, Partition};
use crate::report::{rel_dev, Report};
use crate::symfunc::{cauchy_littlewood_lhs, schur_char, schur_miwa, EigenList, FlowVector};
use crate::tau::{apply_conv, tau_hypergeom_det, tau_hypergeom_series, TauSeries};

/// Default tolerances; every field can be overridden.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub schur_two_route: f64,
    pub cauchy_littlewood: f64,
    pub example1: f64,
    pub dethypergeom: f64,
    pub plucker: f64,
    pub semigroup: f64,
    pub prop2: f64,
    pub prop3: f64,
    /// Bound on `|z|`.
    pub hciz: f64,
    pub andreief: f64,
    pub prop56: f64,
    pub gaussian: f64,
    pub prop78: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            schur_two_route: 1e-9,
            cauchy_littlewood: 1e-8,
            example1: 1e-12,
            dethypergeom: 1e-7,
            plucker: 1e-10,
            semigroup: 1e-12,
            prop2: 1e-5,
            prop3: 1e-6,
            hciz: 3.0,
            andreief: 1e-12,
            prop56: 1e-5,
            gaussian: 1e-8,
            prop78: 1e-10,
        }
    }
}

impl Tolerances {
    /// Sets one field by name (`schur-two-route` and `schur_two_route` both work).
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value >= 0.0) {
            return Err(TauError::InvalidInput(format!("tolerance {key} must be >= 0")));
        }
        let slot = match key.replace('-', "_").as_str() {
            "schur_two_route" => &mut self.schur_two_route,
            "cauchy_littlewood" => &mut self.cauchy_littlewood,
            "example1" | "example1_closedform" => &mut self.example1,
            "dethypergeom" => &mut self.dethypergeom,
            "plucker" => &mut self.plucker,
            "semigroup" => &mut self.semigroup,
            "prop2" => &mut self.prop2,
            "prop3" => &mut self.prop3,
            "hciz" => &mut self.hciz,
            "andreief" => &mut self.andreief,
            "prop56" => &mut self.prop56,
            "gaussian" | "gaussian_example" => &mut self.gaussian,
            "prop78" => &mut self.prop78,
            _ => return Err(TauError::Unknown(format!("tolerance {key:?}"))),
        };
        *slot = value;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Haar samples for the Monte Carlo suites.
    pub samples: usize,
    /// Matrix size of the HCIZ check.
    pub n: usize,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            samples: 100_000,
            n: 2,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    SchurTwoRoute,
    CauchyLittlewood,
    Plucker,
    Semigroup,
    Example1Closedform,
    Dethypergeom,
    Andreief,
    Prop2,
    Prop3,
    Prop56,
    Hciz,
    GaussianExample,
    Prop78,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::SchurTwoRoute,
        Suite::CauchyLittlewood,
        Suite::Plucker,
        Suite::Semigroup,
        Suite::Example1Closedform,
        Suite::Dethypergeom,
        Suite::Andreief,
        Suite::Prop2,
        Suite::Prop3,
        Suite::Prop56,
        Suite::Hciz,
        Suite::GaussianExample,
        Suite::Prop78,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SchurTwoRoute => "schur-two-route",
            Suite::CauchyLittlewood => "cauchy-littlewood",
            Suite::Plucker => "plucker",
            Suite::Semigroup => "semigroup",
            Suite::Example1Closedform => "example1-closedform",
            Suite::Dethypergeom => "dethypergeom",
            Suite::Andreief => "andreief",
            Suite::Prop2 => "prop2",
            Suite::Prop3 => "prop3",
            Suite::Prop56 => "prop56",
            Suite::Hciz => "hciz",
            Suite::GaussianExample => "gaussian-example",
            Suite::Prop78 => "prop78",
        }
    }

    fn stream(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).unwrap() as u64 + 1
    }

    pub fn run(self, cfg: &VerifyConfig) -> Result<Vec<Report>> {
        let mut rng = rng_for(cfg.seed, self.stream());
        let tol = &cfg.tolerances;
        match self {
            Suite::SchurTwoRoute => schur_two_route(&mut rng, tol.schur_two_route),
            Suite::CauchyLittlewood => cauchy_littlewood(&mut rng, tol.cauchy_littlewood),
            Suite::Plucker => plucker(&mut rng, tol.plucker),
            Suite::Semigroup => semigroup(&mut rng, tol.semigroup),
            Suite::Example1Closedform => example1(tol.example1),
            Suite::Dethypergeom => dethypergeom(&mut rng, tol.dethypergeom),
            Suite::Andreief => andreief(&mut rng, tol.andreief),
            Suite::Prop2 => prop2(&mut rng, tol.prop2),
            Suite::Prop3 => prop3(&mut rng, tol.prop3),
            Suite::Prop56 => prop56(&mut rng, tol.prop56),
            Suite::Hciz => hciz(cfg, tol.hciz),
            Suite::GaussianExample => gaussian_example(tol.gaussian),
            Suite::Prop78 => prop78(&mut rng, tol.prop78),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = TauError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| TauError::Unknown(format!("suite {s:?}")))
    }
}

/// Resolves `all` or a single suite name.
pub fn suites_for(name: &str) -> Result<Vec<Suite>> {
    if name == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        Ok(vec![name.parse()?])
    }
}

pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<Vec<(Suite, Vec<Report>)>> {
    suites.iter().map(|&s| Ok((s, s.run(cfg)?))).collect()
}

/// Keeps the case with the largest deviation.
struct Worst {
    value: f64,
    oracle: f64,
    dev: f64,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: f64::NAN,
            oracle: f64::NAN,
            dev: -1.0,
        }
    }

    fn push(&mut self, value: f64, oracle: f64, dev: f64) {
        if dev > self.dev || dev.is_nan() {
            *self = Worst { value, oracle, dev };
        }
    }

    fn add(&mut self, value: f64, oracle: f64) {
        self.push(value, oracle, rel_dev(value, oracle));
    }

    fn report(self, quantity: &str, method: impl Into<String>, tol: f64) -> Report {
        Report::with_dev(quantity, method, self.value, self.oracle, self.dev, tol)
    }
}

/// Distinct values in `[lo, hi)` with pairwise gaps of at least `gap`.
fn spaced(rng: &mut ChaCha20Rng, n: usize, lo: f64, hi: f64, gap: f64) -> EigenList {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        let e = EigenList::new(v).expect("finite draws");
        if n < 2 || e.min_gap() >= gap {
            return e;
        }
    }
}

fn pick<'a, T>(rng: &mut ChaCha20Rng, xs: &'a [T]) -> &'a T {
    &xs[rng.random_range(0..xs.len())]
}

fn random_rho(rng: &mut ChaCha20Rng) -> RhoSequence {
    if rng.random_bool(0.5) {
        RhoSequence::exp()
    } else {
        RhoSequence::binomial(rng.random_range(0.5..3.0), rng.random_range(0.1..0.9)).expect("valid parameters")
    }
}

fn random_frame(rng: &mut ChaCha20Rng, n: usize, cutoff: u32) -> Result<FiniteFrame> {
    let depth = FiniteFrame::depth_for(n, cutoff);
    FiniteFrame::new(DMatrix::from_fn(depth, n, |_, _| rng.random_range(-1.0..1.0)))
}

fn schur_two_route(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let mut worst = Worst::new();
    for _ in 0..50 {
        let n = rng.random_range(1..=4);
        let parts = enumerate_partitions(8, n)?;
        let l = pick(rng, &parts);
        let a = spaced(rng, n, 0.1, 1.5, 0.05);
        worst.add(schur_char(l, &a)?, schur_miwa(l, &a));
    }
    Ok(vec![worst.report(
        "schur_two_route",
        "max over 50 cases: bialternant vs Jacobi-Trudi on Miwa variables",
        tol,
    )])
}

fn cauchy_littlewood(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let mut short = Worst::new();
    let mut three = Worst::new();
    for k in 0..40 {
        let order = if k < 20 { 1 + k % 2 } else { 3 };
        let t: Vec<f64> = (0..order).map(|_| rng.random_range(-0.1..=0.1)).collect();
        let u: Vec<f64> = (0..order).map(|_| rng.random_range(-0.1..=0.1)).collect();
        let exact = t.iter().zip(&u).enumerate().map(|(i, (a, b))| (i + 1) as f64 * a * b).sum::<f64>().exp();
        let lhs = cauchy_littlewood_lhs(&FlowVector::new(t)?, &FlowVector::new(u)?, 10)?;
        if order < 3 { short.add(lhs, exact) } else { three.add(lhs, exact) }
    }
    // box corners for two flows
    for s in [0.1, -0.1] {
        let t = FlowVector::new(vec![0.1, 0.1])?;
        let u = FlowVector::new(vec![s, s])?;
        short.add(cauchy_littlewood_lhs(&t, &u, 10)?, (3.0 * 0.1 * s).exp());
    }
    Ok(vec![
        short.report(
            "cauchy_littlewood",
            "max over 22 draws with 1 or 2 flows: cutoff-10 Schur sum vs exp(sum i t_i u_i)",
            tol,
        ),
        Report::info(
            "cauchy_littlewood_three_flows",
            "worst of 20 draws with 3 flows (truncation tail can exceed 1e-8)",
            three.value,
            three.oracle,
        ),
    ])
}

fn example1(tol: f64) -> Result<Vec<Report>> {
    let rho = RhoSequence::exp();
    let mut worst = Worst::new();
    for n in 1..=5usize {
        for l in enumerate_partitions(10, n)? {
            let v = rho.r_lambda(&l, n as i64)? * superfactorial(n - 1) * pochhammer_ext(n as i64, &l);
            worst.add(v, 1.0);
        }
    }
    Ok(vec![worst.report(
        "example1_closedform",
        "max over l(lambda) <= N <= 5, |lambda| <= 10: r_lambda(N) (prod i!) (N)_lambda",
        tol,
    )])
}

fn dethypergeom(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let mut worst = [Worst::new(), Worst::new()];
    for k in 0..50 {
        let n = rng.random_range(2..=3);
        let (rho, slot) = if k % 2 == 0 {
            (RhoSequence::exp(), 0)
        } else {
            (
                RhoSequence::binomial(rng.random_range(0.5..2.5), rng.random_range(0.2..0.8))?,
                1,
            )
        };
        let a = spaced(rng, n, 0.05, 0.5, 0.05);
        let b = spaced(rng, n, 0.05, 0.5, 0.05);
        let s = tau_hypergeom_series(&rho, n as i64, &a, &b, 20)?.value;
        let d = tau_hypergeom_det(&rho, &a, &b)?.value;
        worst[slot].add(s, d);
    }
    let [e, b] = worst;
    Ok(vec![
        e.report("dethypergeom_exp", "max over 25 draws: cutoff-20 series vs determinant", tol),
        b.report("dethypergeom_binomial", "max over 25 draws: cutoff-20 series vs determinant", tol),
    ])
}

/// A random exchange relation whose minors all lie in the table.
fn table_check(
    rng: &mut ChaCha20Rng,
    coeffs: &std::collections::BTreeMap<Partition, f64>,
    n: usize,
) -> Result<f64> {
    for _ in 0..10_000 {
        let a: Vec<i64> = sample(rng, n + 5, n - 1).into_iter().map(|i| i as i64).collect();
        let b: Vec<i64> = sample(rng, n + 5, n + 1).into_iter().map(|i| i as i64).collect();
        if let Ok(r) = table_residual(coeffs, n, &a, &b) {
            return Ok(r.relative());
        }
    }
    Err(TauError::InvalidInput("no exchange relation fits the table".into()))
}

fn plucker(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let cutoff = 8;
    let mut before = 0.0f64;
    let mut after = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let tau = TauSeries::from_frame(&random_frame(rng, n, cutoff)?, cutoff)?;
        let conv = apply_conv(&random_rho(rng), &tau)?;
        let full = |t: &TauSeries| -> std::collections::BTreeMap<Partition, f64> {
            enumerate_partitions(cutoff, n)
                .expect("cutoff within limits")
                .into_iter()
                .map(|l| {
                    let v = t.get(&l);
                    (l, v)
                })
                .collect()
        };
        let (c0, c1) = (full(&tau), full(&conv));
        before = before.max(table_check(rng, &c0, n)?);
        after = after.max(table_check(rng, &c1, n)?);
    }
    Ok(vec![
        Report::with_dev("plucker_frame", "max relative exchange residual, 100 random frames", before, 0.0, before, tol),
        Report::with_dev(
            "plucker_convolved",
            "max relative exchange residual after apply_conv, 100 random frames",
            after,
            0.0,
            after,
            tol,
        ),
    ])
}

fn semigroup(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let cutoff = 8;
    let mut mismatches = 0usize;
    let mut compared = 0usize;
    let mut worst = Worst::new();
    for _ in 0..20 {
        let n = rng.random_range(1..=4);
        let (inner, outer) = (random_rho(rng), random_rho(rng));
        let prod = rho_product(&outer, &inner)?;
        let tau = TauSeries::from_frame(&random_frame(rng, n, cutoff)?, cutoff)?;
        let twice = apply_conv(&outer, &apply_conv(&inner, &tau)?)?;
        let once = apply_conv(&prod, &tau)?;
        for l in enumerate_partitions(cutoff, n)? {
            compared += 1;
            if twice.get(&l).to_bits() != once.get(&l).to_bits() {
                mismatches += 1;
            }
        }
        let parts = enumerate_partitions(cutoff, n)?;
        let l = pick(rng, &parts);
        let ni = n as i64;
        worst.add(prod.r_lambda(l, ni)?, outer.r_lambda(l, ni)? * inner.r_lambda(l, ni)?);
    }
    Ok(vec![
        Report::with_dev(
            "semigroup_action",
            format!("coefficients differing bitwise between two steps and the product ({compared} compared)"),
            mismatches as f64,
            0.0,
            mismatches as f64,
            0.0,
        ),
        worst.report("semigroup_r_lambda", "max over 20 cases: r_lambda of product vs product of r_lambda", tol),
    ])
}

fn andreief(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let mut worst = Worst::new();
    for _ in 0..30 {
        let n = rng.random_range(1..=3);
        let p = rng.random_range(n..=6);
        let x: Vec<f64> = (0..p).map(|_| rng.random_range(-1.5..1.5)).collect();
        let w: Vec<f64> = (0..p).map(|_| rng.random_range(0.1..1.0)).collect();
        let c: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let phi = DMatrix::from_fn(n, p, |i, k| x[k].powi(i as i32) + c[i] * x[k]);
        let psi = DMatrix::from_fn(n, p, |j, k| (c[n + j] * x[k] + j as f64 * x[k] * x[k]).exp());
        let s = andreief_sides(&w, &phi, &psi)?;
        worst.push(s.lhs, s.rhs, s.rel_dev());
    }
    Ok(vec![worst.report(
        "andreief",
        "max over 30 discrete measures (<= 6 nodes, N <= 3): permutation-expanded sum vs N! det",
        tol,
    )])
}

fn prop2(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let g = MeasureSpec::gauss(1.0)?;
    let cutoff = 18;
    let mm = moments(&g, moment_degree_for(cutoff, 2))?;
    let mut worst = Worst::new();
    for _ in 0..5 {
        let a = spaced(rng, 2, -0.5, 0.5, 0.05);
        let series = superfactorial(1) * z_n_ext_series(&RhoSequence::exp(), &mm, &a, cutoff)?.value;
        worst.add(series, z_n_ext_quadrature(&g, &a, 60)?);
    }
    Ok(vec![worst.report(
        "prop2",
        "max over 5 draws, N=2, gauss(1): series route vs eigenvalue quadrature",
        tol,
    )])
}

fn prop3(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let cutoff = 18;
    let g = MeasureSpec::gauss(1.0)?;
    let table = MeasureSpec::table(vec![-1.0, -0.5, 0.0, 0.5, 1.0], vec![0.2, 0.7, 1.0, 0.7, 0.2])?;
    let mg = moments(&g, moment_degree_for(cutoff, 2))?;
    let mt = moments(&table, moment_degree_for(cutoff, 2))?;
    let mut worst = Worst::new();
    for k in 0..10 {
        let a = spaced(rng, 2, -0.5, 0.5, 0.05);
        let (rho, m, mm) = if k % 2 == 0 {
            (RhoSequence::exp(), &g, &mg)
        } else {
            (RhoSequence::binomial(rng.random_range(0.5..2.0), rng.random_range(0.2..0.8))?, &table, &mt)
        };
        let det = z_n_rho_det(&rho, m, &a)?.value;
        worst.add(det, z_n_ext_series(&rho, mm, &a, cutoff)?.value);
    }
    Ok(vec![worst.report(
        "prop3",
        "max over 10 draws, N=2: determinant formula vs convolved series",
        tol,
    )])
}

fn prop56(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let g = MeasureSpec::gauss(1.0)?;
    let cutoff = 14;
    let bm = bimoments(&g, &g, bimoment_degree_for(cutoff, 2))?;
    let e = RhoSequence::exp();
    let mut worst = Worst::new();
    for _ in 0..5 {
        let a = spaced(rng, 2, -0.3, 0.3, 0.05);
        let b = spaced(rng, 2, -0.3, 0.3, 0.05);
        let s = z2_ext_series(&e, &e, &bm, &a, &b, cutoff)?.value;
        worst.add(s, z2_ext_det(&e, &e, &g, &g, &a, &b)?.value);
    }
    Ok(vec![worst.report(
        "prop56",
        "max over 5 draws, N=2, gauss(1) x gauss(1), exp x exp: cutoff-14 series vs determinant",
        tol,
    )])
}

fn hciz(cfg: &VerifyConfig, tol: f64) -> Result<Vec<Report>> {
    let n = cfg.n;
    let (a, x) = if n == 2 {
        (EigenList::new(vec![1.0, 0.2])?, EigenList::new(vec![0.7, -0.3])?)
    } else {
        let mut rng = rng_for(cfg.seed, 0);
        (spaced(&mut rng, n, -1.0, 1.0, 0.1), spaced(&mut rng, n, -1.0, 1.0, 0.1))
    };
    let h = hciz_check(&a, &x, cfg.samples, cfg.seed)?;
    let l = if n >= 2 { Partition::new(vec![2, 1])? } else { Partition::row(2) };
    let c = character_integral_check(&l, &a, &x, cfg.samples, cfg.seed)?;
    let line = |q: &str, m: String, r: &crate::matmodels::HaarCheck| {
        let (dev, t) = if r.exact { (r.rel_dev(), 1e-12) } else { (r.z.abs(), tol) };
        Report::with_dev(q, m, r.estimate.mean, r.closed, dev, t)
    };
    Ok(vec![
        line(
            "hciz",
            format!("N={n}, {} Haar samples: |z| of Monte Carlo mean vs closed form", cfg.samples),
            &h,
        ),
        line(
            "character_integral",
            format!("lambda={l}, N={n}, {} Haar samples: |z| of d E[s(AUXU*)] vs s(A)s(X)", cfg.samples),
            &c,
        ),
    ])
}

fn gaussian_example(tol: f64) -> Result<Vec<Report>> {
    let g = MeasureSpec::gauss(1.0)?;
    let (a, b) = (0.3, 0.2);
    let (ea, eb) = (EigenList::new(vec![a])?, EigenList::new(vec![b])?);
    let oracle = quad2d_coupled(&g, &g, &|x, y| (a * x + b * y).exp())?.value;
    let closed = z2_gaussian_closed(1.0, &ea, &eb)?;
    let mut out = vec![
        Report::compare("gaussian_rederived", "N=1, sigma=1: completed-square closed form vs coupled quadrature", closed.rederived, oracle, tol),
        Report::info("gaussian_paper_literal", "N=1, sigma=1: displayed constants vs coupled quadrature", closed.paper_literal, oracle),
    ];
    for sigma in [1.0, 2.0, 5.0, 10.0] {
        let c = z2_gaussian_closed(sigma, &ea, &eb)?;
        out.push(Report::info(
            format!("gaussian_sweep_sigma_{sigma}"),
            "paper-literal vs rederived closed form",
            c.paper_literal,
            c.rederived,
        ));
    }
    Ok(out)
}

fn prop78(rng: &mut ChaCha20Rng, tol: f64) -> Result<Vec<Report>> {
    let mut worst = Worst::new();
    for _ in 0..5 {
        let xs: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ys: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w = DMatrix::from_fn(4, 4, |_, _| rng.random_range(0.1..1.0));
        let mu = CoupledMeasure::grid(&xs, &ys, &w)?;
        let a = spaced(rng, 2, -0.8, 0.8, 0.05);
        let b = spaced(rng, 2, -0.8, 0.8, 0.05);
        let rho_t = RhoSequence::binomial(1.5, 0.5)?;
        let v = tau2_multi_int(&mu, &RhoSequence::exp(), &rho_t, &a, &b)?;
        worst.add(v.det.value, v.direct.expect("N = 2 has a direct route"));
    }
    Ok(vec![worst.report(
        "prop78",
        "max over 5 random 4x4 grid measures, N=2: determinant route vs direct 4D sum",
        tol,
    )])
}
