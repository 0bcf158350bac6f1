//! Convolution data: the sequence `ρ_i`, its ratios `r_i = ρ_i / ρ_{i−1}`, the
//! normalisation `c_r(N)`, the diagonal factors `r_λ(N)` and the Fourier
//! multiplier action `C_ρ` on Laurent polynomials.
//!
//! Built-in families use the geometric choice `ρ_i = 1` for every `i ≤ −1`
//! and are defined on all of `Z`. Custom tables carry a finite window.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TauError};
use crate::partitions::Partition;

/// Relative tolerance of the internal cell-product vs. Frobenius-ratio check.
const DUAL_FORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum RhoFamily {
    /// `ρ_+(z) = e^z`
    Exp,
    /// `ρ_+(z) = (1 − ζ z)^{−a}`
    Binomial { a: f64, zeta: f64 },
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
enum Source {
    Exp,
    Binomial { a: f64, zeta: f64 },
    Table { lo: i64, values: Vec<f64> },
    /// Factors in application order: `ρ̃ * ρ` is stored as `[ρ, ρ̃]`.
    Product(Vec<RhoSequence>),
}

/// The sequence `{ρ_i}` defining a convolution symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoSequence {
    source: Source,
}

/// `ρ_+(z)` with an estimate of the truncation error (zero for closed forms).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RhoPlus {
    pub value: f64,
    pub error_estimate: f64,
}

/// Default degree for truncated `ρ_+` sums.
pub const DEFAULT_RHO_PLUS_TRUNC: usize = 60;

impl RhoSequence {
    /// `ρ_i = 1/i!` for `i ≥ 0`, `1` below.
    pub fn exp() -> Self {
        Self { source: Source::Exp }
    }

    /// `ρ_i = (a)_i ζ^i / i!` for `i ≥ 0`, `1` below.
    ///
    /// Requires `0 < ζ < 1` and `a > 0` so that every `ρ_i` is positive.
    pub fn binomial(a: f64, zeta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(TauError::InvalidFamily(format!(
                "binomial needs 0 < zeta < 1, got {zeta}"
            )));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(TauError::InvalidFamily(format!(
                "binomial needs a > 0 (a nonpositive a makes some rho_i vanish or change sign), got {a}"
            )));
        }
        Ok(Self {
            source: Source::Binomial { a, zeta },
        })
    }

    /// Custom values on the window `[lo, lo + values.len() − 1]`, which must contain `−1` and `0`.
    pub fn custom(lo: i64, values: Vec<f64>) -> Result<Self> {
        let hi = lo + values.len() as i64 - 1;
        if lo > -1 || hi < 0 {
            return Err(TauError::InvalidFamily(format!(
                "custom window [{lo}, {hi}] must contain -1 and 0"
            )));
        }
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| **v == 0.0 || !v.is_finite())
        {
            return Err(TauError::InvalidFamily(format!(
                "rho_{} = {v} must be finite and nonzero",
                lo + k as i64
            )));
        }
        Ok(Self {
            source: Source::Table { lo, values },
        })
    }

    /// Custom sequence from an index → value map over a contiguous window.
    pub fn from_map(map: &BTreeMap<i64, f64>) -> Result<Self> {
        let (Some((&lo, _)), Some((&hi, _))) = (map.first_key_value(), map.last_key_value())
        else {
            return Err(TauError::InvalidFamily("empty custom sequence".into()));
        };
        if (hi - lo + 1) as usize != map.len() {
            return Err(TauError::InvalidFamily(format!(
                "custom window [{lo}, {hi}] has gaps"
            )));
        }
        Self::custom(lo, map.values().copied().collect())
    }

    /// Parses the JSON object `{"index": value, …}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, f64> = serde_json::from_str(text)?;
        let map = raw
            .into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<i64>()
                    .map(|i| (i, v))
                    .map_err(|e| TauError::Parse(format!("rho index {k:?}: {e}")))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::from_map(&map)
    }

    /// The all-ones sequence on `[lo, hi]`: the identity convolution.
    pub fn ones(lo: i64, hi: i64) -> Result<Self> {
        Self::custom(lo, vec![1.0; (hi - lo + 1).max(0) as usize])
    }

    /// Parses `exp`, `binomial:a=2,zeta=0.5` or `custom:file=rho.json`
    /// (relative paths resolved against `base`).
    pub fn from_spec(spec: &str, base: Option<&Path>) -> Result<Self> {
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let kv = parse_kv(args)?;
        let get = |k: &str| {
            kv.get(k)
                .ok_or_else(|| TauError::Parse(format!("rho spec {spec:?} is missing {k}")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse::<f64>()
                .map_err(|e| TauError::Parse(format!("rho spec {k}: {e}")))
        };
        let allow = |keys: &[&str]| -> Result<()> {
            match kv.keys().find(|k| !keys.contains(&k.as_str())) {
                Some(k) => Err(TauError::Parse(format!("unknown rho parameter {k:?}"))),
                None => Ok(()),
            }
        };
        match name.trim() {
            "exp" => {
                allow(&[])?;
                Ok(Self::exp())
            }
            "binomial" => {
                allow(&["a", "zeta"])?;
                Self::binomial(num("a")?, num("zeta")?)
            }
            "custom" => {
                allow(&["file"])?;
                let file = Path::new(get("file")?);
                let path = match base {
                    Some(b) if file.is_relative() => b.join(file),
                    _ => file.to_path_buf(),
                };
                Self::from_json(&std::fs::read_to_string(path)?)
            }
            other => Err(TauError::Unknown(format!("rho family {other:?}"))),
        }
    }

    pub fn family(&self) -> RhoFamily {
        match self.source {
            Source::Exp => RhoFamily::Exp,
            Source::Binomial { a, zeta } => RhoFamily::Binomial { a, zeta },
            _ => RhoFamily::Custom,
        }
    }

    /// Index window `[lo, hi]`; `None` means all of `Z`.
    pub fn window(&self) -> Option<(i64, i64)> {
        match &self.source {
            Source::Exp | Source::Binomial { .. } => None,
            Source::Table { lo, values } => Some((*lo, lo + values.len() as i64 - 1)),
            Source::Product(fs) => fs.iter().filter_map(|f| f.window()).reduce(|x, y| {
                (x.0.max(y.0), x.1.min(y.1))
            }),
        }
    }

    fn window_error(&self, index: i64) -> TauError {
        let (lo, hi) = self.window().unwrap_or((i64::MIN, i64::MAX));
        TauError::Window { index, lo, hi }
    }

    /// `ρ_i`
    pub fn rho(&self, i: i64) -> Result<f64> {
        match &self.source {
            Source::Exp => Ok(if i <= 0 {
                1.0
            } else {
                (1..=i).fold(1.0, |acc, k| acc / k as f64)
            }),
            Source::Binomial { a, zeta } => Ok(if i <= 0 {
                1.0
            } else {
                (1..=i).fold(1.0, |acc, k| acc * (a + (k - 1) as f64) * zeta / k as f64)
            }),
            Source::Table { lo, values } => {
                let k = i - lo;
                if k < 0 || k >= values.len() as i64 {
                    return Err(self.window_error(i));
                }
                Ok(values[k as usize])
            }
            Source::Product(fs) => {
                if let Some((lo, hi)) = self.window() {
                    if i < lo || i > hi {
                        return Err(self.window_error(i));
                    }
                }
                fs.iter().try_fold(1.0, |acc, f| Ok::<f64, TauError>(acc * f.rho(i)?))
            }
        }
    }

    /// `r_i = ρ_i / ρ_{i−1}`; closed forms for the built-in families.
    pub fn r(&self, i: i64) -> Result<f64> {
        match &self.source {
            Source::Exp => Ok(if i >= 1 { 1.0 / i as f64 } else { 1.0 }),
            Source::Binomial { a, zeta } => Ok(if i >= 1 {
                zeta * (a - 1.0 + i as f64) / i as f64
            } else {
                1.0
            }),
            _ => Ok(self.rho(i)? / self.rho(i - 1)?),
        }
    }

    /// `c_r(N)`
    pub fn c_r(&self, n: i64) -> Result<f64> {
        match n.cmp(&0) {
            std::cmp::Ordering::Greater => (0..n).try_fold(1.0, |acc, i| Ok::<f64, TauError>(acc * self.rho(i)?)),
            std::cmp::Ordering::Equal => Ok(1.0),
            std::cmp::Ordering::Less => Ok(1.0 / (n..0).try_fold(1.0, |acc, i| Ok::<f64, TauError>(acc * self.rho(i)?))?),
        }
    }

    /// `R_ρ = Π_{i ≥ 1} ρ_{−i}`, taken over the stored window for custom tables.
    pub fn r_cap(&self) -> f64 {
        match &self.source {
            Source::Exp | Source::Binomial { .. } => 1.0,
            Source::Table { lo, values } => values[..(-lo) as usize].iter().product(),
            Source::Product(fs) => fs.iter().map(|f| f.r_cap()).product(),
        }
    }

    /// `c_r(N) Π_{(i,j)∈λ} r_{N−i+j}`
    pub fn r_lambda_cells(&self, lambda: &Partition, n: i64) -> Result<f64> {
        lambda.cells().try_fold(self.c_r(n)?, |acc, (i, j)| -> Result<f64> {
            Ok(acc * self.r(n - i as i64 + j as i64)?)
        })
    }

    /// `c_r(N) Π_k ρ_{N+α_k} / ρ_{N−β_k−1}`
    pub fn r_lambda_frobenius(&self, lambda: &Partition, n: i64) -> Result<f64> {
        let f = lambda.to_frobenius();
        f.alpha
            .iter()
            .zip(&f.beta)
            .try_fold(self.c_r(n)?, |acc, (&al, &be)| -> Result<f64> {
                Ok(acc * self.rho(n + al as i64)? / self.rho(n - be as i64 - 1)?)
            })
    }

    /// Diagonal factor `r_λ(N)`. Both closed forms are evaluated and must agree.
    pub fn r_lambda(&self, lambda: &Partition, n: i64) -> Result<f64> {
        let cells = self.r_lambda_cells(lambda, n)?;
        let frob = self.r_lambda_frobenius(lambda, n)?;
        if (cells - frob).abs() > DUAL_FORM_TOL * cells.abs().max(frob.abs()) {
            return Err(TauError::RouteMismatch(format!(
                "r_lambda({lambda}, {n}): cell product {cells:e} vs Frobenius form {frob:e}"
            )));
        }
        Ok(cells)
    }

    /// Diagonal factors of each convolution in application order. A plain
    /// sequence has one; `ρ̃ * ρ` yields `[r^ρ_λ(N), r^ρ̃_λ(N)]`.
    pub fn diagonal_factors(&self, lambda: &Partition, n: i64) -> Result<Vec<f64>> {
        match &self.source {
            Source::Product(fs) => {
                let mut out = Vec::with_capacity(fs.len());
                for f in fs {
                    out.extend(f.diagonal_factors(lambda, n)?);
                }
                Ok(out)
            }
            _ => Ok(vec![self.r_lambda(lambda, n)?]),
        }
    }

    /// Applies the diagonal action to one coefficient, factor by factor.
    pub fn scale_coefficient(&self, lambda: &Partition, n: i64, value: f64) -> Result<f64> {
        Ok(self
            .diagonal_factors(lambda, n)?
            .into_iter()
            .fold(value, |v, r| r * v))
    }

    /// `C_ρ(w)_i = ρ_{−i−1} w_i`
    pub fn conv_action(&self, w: &LaurentPoly) -> Result<LaurentPoly> {
        match &self.source {
            Source::Product(fs) => fs.iter().try_fold(w.clone(), |acc, f| f.conv_action(&acc)),
            _ => {
                let coeffs = w
                    .iter()
                    .map(|(i, c)| Ok(self.rho(-i - 1)? * c))
                    .collect::<Result<Vec<_>>>()?;
                Ok(LaurentPoly { lo: w.lo, coeffs })
            }
        }
    }

    /// `ρ_+(z) = Σ_{i≥0} ρ_i z^i`.
    ///
    /// Closed forms for the built-in families. Custom tables are summed up to
    /// degree `min(trunc, i_max)` and the first omitted term is reported; when
    /// that actually truncates the table, `|z| < 1` is required. A table whose
    /// window ends at or below `trunc` is an exact polynomial.
    pub fn rho_plus(&self, z: f64, trunc: usize) -> Result<RhoPlus> {
        match &self.source {
            Source::Exp => Ok(RhoPlus {
                value: z.exp(),
                error_estimate: 0.0,
            }),
            Source::Binomial { a, zeta } => {
                if (zeta * z).abs() >= 1.0 {
                    return Err(TauError::Domain {
                        z,
                        reason: format!("|zeta z| = {} >= 1", (zeta * z).abs()),
                    });
                }
                Ok(RhoPlus {
                    value: (1.0 - zeta * z).powf(-a),
                    error_estimate: 0.0,
                })
            }
            _ => {
                let hi = self.window().map_or(i64::MAX, |w| w.1);
                let top = (trunc as i64).min(hi);
                if top < hi && z.abs() >= 1.0 {
                    return Err(TauError::Domain {
                        z,
                        reason: "truncated custom rho_+ needs |z| < 1".into(),
                    });
                }
                let mut value = 0.0;
                let mut zp = 1.0;
                for i in 0..=top {
                    value += self.rho(i)? * zp;
                    zp *= z;
                }
                let error_estimate = if top < hi {
                    (self.rho(top + 1)? * zp).abs()
                } else {
                    0.0
                };
                if !value.is_finite() {
                    return Err(TauError::Domain {
                        z,
                        reason: "truncated rho_+ series overflowed".into(),
                    });
                }
                Ok(RhoPlus {
                    value,
                    error_estimate,
                })
            }
        }
    }

    /// `ρ_+(z)` at the default truncation, value only.
    pub fn rho_plus_value(&self, z: f64) -> Result<f64> {
        Ok(self.rho_plus(z, DEFAULT_RHO_PLUS_TRUNC)?.value)
    }
}

/// Pointwise product `(ρ̃ * ρ)_i = ρ̃_i ρ_i` on the intersection of the windows.
///
/// The result remembers its factors so that its action is `C_ρ̃ ∘ C_ρ` with
/// identical floating-point factors in a fixed order.
pub fn rho_product(outer: &RhoSequence, inner: &RhoSequence) -> Result<RhoSequence> {
    let mut fs = Vec::new();
    for s in [inner, outer] {
        match &s.source {
            Source::Product(inner_fs) => fs.extend(inner_fs.iter().cloned()),
            _ => fs.push(s.clone()),
        }
    }
    let out = RhoSequence {
        source: Source::Product(fs),
    };
    if let Some((lo, hi)) = out.window() {
        if lo > -1 || hi < 0 {
            return Err(TauError::InvalidFamily(format!(
                "product window [{lo}, {hi}] does not contain -1 and 0"
            )));
        }
    }
    Ok(out)
}

impl FromStr for RhoSequence {
    type Err = TauError;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_spec(s, None)
    }
}

pub(crate) fn parse_kv(args: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for item in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| TauError::Parse(format!("expected key=value, got {item:?}")))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(TauError::Parse(format!("duplicate key {k:?}")));
        }
    }
    Ok(out)
}

/// Finite Laurent polynomial `Σ_{i=lo}^{hi} w_i z^i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<f64>,
}

impl LaurentPoly {
    pub fn new(lo: i64, coeffs: Vec<f64>) -> Self {
        Self { lo, coeffs }
    }

    pub fn monomial(i: i64, c: f64) -> Self {
        Self {
            lo: i,
            coeffs: vec![c],
        }
    }

    pub fn coeff(&self, i: i64) -> f64 {
        let k = i - self.lo;
        if k < 0 {
            return 0.0;
        }
        self.coeffs.get(k as usize).copied().unwrap_or(0.0)
    }

    /// `(i, w_i)` over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, &c)| (self.lo + k as i64, c))
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.iter().map(|(i, c)| c * z.powi(i as i32)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{enumerate_partitions, pochhammer_ext};
    use crate::linalg::superfactorial;
    use proptest::prelude::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    /// `(x)_k` rising factorial, computed independently of the family code.
    fn rising(x: f64, k: u32) -> f64 {
        (0..k).map(|i| x + i as f64).product()
    }

    #[test]
    fn exp_family_values() {
        let r = RhoSequence::exp();
        assert!((r.rho(3).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(r.r(4).unwrap(), 0.25);
        assert_eq!(r.r(0).unwrap(), 1.0);
        assert_eq!(r.rho(-5).unwrap(), 1.0);
        assert_eq!(r.r_cap(), 1.0);
    }

    #[test]
    fn binomial_family_values() {
        let r = RhoSequence::binomial(2.0, 0.5).unwrap();
        assert!((r.rho(2).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(r.r(1).unwrap(), 1.0);
        assert_eq!(r.rho(-3).unwrap(), 1.0);
        assert!(RhoSequence::binomial(-1.0, 0.5).is_err());
        assert!(RhoSequence::binomial(1.0, 1.0).is_err());
    }

    #[test]
    fn c_r_examples() {
        let r = RhoSequence::exp();
        assert_eq!(r.c_r(0).unwrap(), 1.0);
        assert_eq!(r.c_r(3).unwrap(), 0.5);
        assert_eq!(r.c_r(-2).unwrap(), 1.0);
        let c = RhoSequence::custom(-1, vec![2.0, 3.0]).unwrap();
        assert_eq!(c.c_r(-1).unwrap(), 0.5);
        assert!(matches!(c.c_r(2), Err(TauError::Window { .. })));
    }

    #[test]
    fn r_lambda_examples() {
        let r = RhoSequence::exp();
        assert!(rel(r.r_lambda(&p(&[2, 1]), 3).unwrap(), 1.0 / 48.0) < 1e-15);
        for n in -2..4 {
            assert_eq!(r.r_lambda(&Partition::empty(), n).unwrap(), r.c_r(n).unwrap());
        }
        let b = RhoSequence::binomial(2.5, 0.3).unwrap();
        assert!(rel(b.r_lambda(&p(&[1]), 1).unwrap(), 2.5 * 0.3) < 1e-15);
    }

    #[test]
    fn dual_forms_agree_for_families() {
        let fams = [RhoSequence::exp(), RhoSequence::binomial(1.7, 0.4).unwrap()];
        for fam in &fams {
            for l in enumerate_partitions(10, 10).unwrap() {
                for n in -3..=5 {
                    let c = fam.r_lambda_cells(&l, n).unwrap();
                    let f = fam.r_lambda_frobenius(&l, n).unwrap();
                    assert!(rel(c, f) <= 1e-12, "{l} N={n}: {c} {f}");
                }
            }
        }
    }

    #[test]
    fn example_one_closed_form() {
        let r = RhoSequence::exp();
        for n in 1..=5i64 {
            for l in enumerate_partitions(10, n as usize).unwrap() {
                let v = r.r_lambda(&l, n).unwrap()
                    * superfactorial(n as usize - 1)
                    * pochhammer_ext(n, &l);
                assert!((v - 1.0).abs() <= 1e-12, "{l} N={n}: {v}");
            }
        }
    }

    #[test]
    fn example_two_closed_form() {
        for (a, z) in [(2.0, 0.5), (0.7, 0.9), (3.3, 0.15)] {
            let r = RhoSequence::binomial(a, z).unwrap();
            for n in 1..=4i64 {
                for l in enumerate_partitions(8, n as usize).unwrap() {
                    let pref: f64 = (0..n as u32)
                        .map(|i| rising(a, i) / superfactorial(0).max(1.0) / crate::linalg::factorial(i as usize))
                        .product();
                    let shifted: f64 = l
                        .cells()
                        .map(|(i, j)| a - 1.0 + n as f64 - i as f64 + j as f64)
                        .product();
                    let want = pref
                        * z.powi((l.weight() as i64 + n * (n - 1) / 2) as i32)
                        * shifted
                        / pochhammer_ext(n, &l);
                    let got = r.r_lambda(&l, n).unwrap();
                    assert!(rel(got, want) <= 1e-10, "{l} N={n}");
                }
            }
        }
    }

    #[test]
    fn product_values_and_windows() {
        let e = RhoSequence::exp();
        let ee = rho_product(&e, &e).unwrap();
        assert_eq!(ee.family(), RhoFamily::Custom);
        assert!((ee.rho(2).unwrap() - 0.25).abs() < 1e-16);
        let ones = RhoSequence::ones(-20, 20).unwrap();
        let eo = rho_product(&ones, &e).unwrap();
        for i in -20..=20 {
            assert_eq!(eo.rho(i).unwrap(), e.rho(i).unwrap());
        }
        assert!(matches!(eo.rho(21), Err(TauError::Window { .. })));
        let left = RhoSequence::custom(-3, vec![1.0; 4]).unwrap();
        let right = RhoSequence::custom(0, vec![1.0; 3]);
        assert!(right.is_err());
        assert!(rho_product(&left, &ones).is_ok());
    }

    #[test]
    fn product_action_is_composition() {
        let b = RhoSequence::binomial(2.0, 0.3).unwrap();
        let e = RhoSequence::exp();
        let be = rho_product(&b, &e).unwrap();
        let w = LaurentPoly::new(-6, (0..12).map(|k| 0.3 * k as f64 - 1.1).collect());
        let composed = b.conv_action(&e.conv_action(&w).unwrap()).unwrap();
        assert_eq!(be.conv_action(&w).unwrap(), composed);
        for l in enumerate_partitions(6, 3).unwrap() {
            let direct = b.r_lambda(&l, 3).unwrap() * (e.r_lambda(&l, 3).unwrap() * 0.7);
            assert_eq!(be.scale_coefficient(&l, 3, 0.7).unwrap(), direct);
            let pointwise = be.r_lambda(&l, 3).unwrap();
            assert!(rel(pointwise * 0.7, direct) <= 1e-12);
        }
    }

    #[test]
    fn conv_action_examples() {
        let e = RhoSequence::exp();
        assert_eq!(
            e.conv_action(&LaurentPoly::monomial(-1, 1.0)).unwrap(),
            LaurentPoly::monomial(-1, 1.0)
        );
        assert_eq!(
            e.conv_action(&LaurentPoly::monomial(2, 1.0)).unwrap(),
            LaurentPoly::monomial(2, 1.0)
        );
        let b = RhoSequence::binomial(2.0, 0.5).unwrap();
        let out = b.conv_action(&LaurentPoly::monomial(-4, 1.0)).unwrap();
        // ρ_3 = (2)_3 · 0.5³ / 3!
        let want = rising(2.0, 3) * 0.125 / 6.0;
        assert!((out.coeff(-4) - want).abs() < 1e-15);
        assert!((want - 0.5).abs() < 1e-15);
        let c = RhoSequence::custom(-2, vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            c.conv_action(&LaurentPoly::monomial(-4, 1.0)),
            Err(TauError::Window { .. })
        ));
    }

    #[test]
    fn rho_plus_examples() {
        let e = RhoSequence::exp();
        assert!((e.rho_plus_value(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        let b = RhoSequence::binomial(2.0, 0.5).unwrap();
        assert!((b.rho_plus_value(1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(matches!(b.rho_plus(2.0, 10), Err(TauError::Domain { .. })));
        let c = RhoSequence::custom(-1, vec![1.0, 0.25, 0.5, 0.125]).unwrap();
        assert_eq!(c.rho_plus_value(0.0).unwrap(), 0.25);
        assert_eq!(e.rho_plus_value(0.0).unwrap(), 1.0);
        let v = c.rho_plus(0.5, 1).unwrap();
        assert_eq!(v.value, 0.25 + 0.5 * 0.5);
        assert_eq!(v.error_estimate, 0.125 * 0.25);
        assert!(matches!(c.rho_plus(2.0, 1), Err(TauError::Domain { .. })));
        assert_eq!(c.rho_plus(2.0, 5).unwrap().value, 0.25 + 1.0 + 0.5);
    }

    #[test]
    fn truncated_series_matches_closed_forms() {
        // custom tables copied from the families reproduce ρ_+ by summation
        for fam in [RhoSequence::exp(), RhoSequence::binomial(1.5, 0.4).unwrap()] {
            let values: Vec<f64> = (-1..=80).map(|i| fam.rho(i).unwrap()).collect();
            let c = RhoSequence::custom(-1, values).unwrap();
            for z in [-0.9, 0.3, 1.2] {
                let s = c.rho_plus(z, 80).unwrap();
                let f = fam.rho_plus_value(z).unwrap();
                assert!(rel(s.value, f) < 1e-13, "{z}");
            }
        }
    }

    #[test]
    fn custom_json() {
        let c = RhoSequence::from_json(r#"{"-1": 1.0, "0": 2.0, "1": 0.5}"#).unwrap();
        assert_eq!(c.rho(0).unwrap(), 2.0);
        assert_eq!(c.window(), Some((-1, 1)));
        assert!(RhoSequence::from_json(r#"{"-1": 1.0, "1": 0.5}"#).is_err());
        assert!(RhoSequence::from_json(r#"{"-1": 1.0, "0": 0.0}"#).is_err());
    }

    #[test]
    fn spec_strings() {
        assert_eq!(RhoSequence::from_str("exp").unwrap().family(), RhoFamily::Exp);
        assert_eq!(
            "binomial:a=2,zeta=0.5".parse::<RhoSequence>().unwrap().family(),
            RhoFamily::Binomial { a: 2.0, zeta: 0.5 }
        );
        assert!("binomial:a=2".parse::<RhoSequence>().is_err());
        assert!("binomial:a=2,zeta=0.5,b=1".parse::<RhoSequence>().is_err());
        assert!("gamma".parse::<RhoSequence>().is_err());
    }

    proptest! {
        #[test]
        fn product_is_multiplicative(a in 0.2f64..3.0, z in 0.05f64..0.95, n in 1i64..5,
                                     parts in proptest::collection::vec(1u32..4, 0..4)) {
            let mut parts = parts;
            parts.sort_unstable_by(|x, y| y.cmp(x));
            let l = p(&parts);
            let b = RhoSequence::binomial(a, z).unwrap();
            let e = RhoSequence::exp();
            let be = rho_product(&b, &e).unwrap();
            let lhs = be.r_lambda(&l, n).unwrap();
            let rhs = b.r_lambda(&l, n).unwrap() * e.r_lambda(&l, n).unwrap();
            prop_assert!(rel(lhs, rhs) <= 1e-12);
        }
    }
}
