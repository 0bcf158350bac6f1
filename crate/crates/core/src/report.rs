//! One comparison of a computed quantity against its oracle.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub quantity: String,
    pub method: String,
    pub value: f64,
    pub oracle: f64,
    /// Relative deviation, or `|z|` for Monte Carlo comparisons.
    pub rel_dev: f64,
    /// `None` marks an informational line that never fails.
    pub tolerance: Option<f64>,
    pub pass: bool,
}

/// `|value − oracle| / |oracle|`, absolute when the oracle is zero.
pub fn rel_dev(value: f64, oracle: f64) -> f64 {
    let d = (value - oracle).abs();
    if oracle == 0.0 {
        d
    } else {
        d / oracle.abs()
    }
}

impl Report {
    pub fn compare(quantity: impl Into<String>, method: impl Into<String>, value: f64, oracle: f64, tolerance: f64) -> Self {
        Self::with_dev(quantity, method, value, oracle, rel_dev(value, oracle), tolerance)
    }

    pub fn with_dev(
        quantity: impl Into<String>,
        method: impl Into<String>,
        value: f64,
        oracle: f64,
        dev: f64,
        tolerance: f64,
    ) -> Self {
        Report {
            quantity: quantity.into(),
            method: method.into(),
            value,
            oracle,
            rel_dev: dev,
            tolerance: Some(tolerance),
            // NaN deviations fail
            pass: dev <= tolerance,
        }
    }

    pub fn info(quantity: impl Into<String>, method: impl Into<String>, value: f64, oracle: f64) -> Self {
        Report {
            quantity: quantity.into(),
            method: method.into(),
            value,
            oracle,
            rel_dev: rel_dev(value, oracle),
            tolerance: None,
            pass: true,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flags_and_schema() {
        let r = Report::compare("q", "m", 1.0 + 1e-10, 1.0, 1e-9);
        assert!(r.pass);
        assert!(!Report::compare("q", "m", f64::NAN, 1.0, 1.0).pass);
        assert!(Report::info("q", "m", 2.0, 1.0).pass);
        let v: serde_json::Value = serde_json::from_str(&r.to_json_line()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 7);
        for k in ["quantity", "method", "value", "oracle", "rel_dev", "tolerance", "pass"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert!(Report::info("q", "m", 0.0, 0.0).to_json_line().contains("\"tolerance\":null"));
    }
}
