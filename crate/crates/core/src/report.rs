//! Serializable result records shared by every backend and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One eigenvalue of a Laplacian block. `mode` is absent for operators that
/// couple modes and are diagonalized as a whole.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub mode: Option<Vec<i32>>,
    pub degree: usize,
    pub index: usize,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ResidualRecord {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub name: String,
    pub verdict: bool,
    #[serde(default)]
    pub values: BTreeMap<String, f64>,
    #[serde(default)]
    pub detail: String,
}

impl GateRecord {
    pub fn new(name: impl Into<String>, verdict: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict,
            values: BTreeMap::new(),
            detail: detail.into(),
        }
    }

    pub fn with_value(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }
}

/// Outcome of comparing a computed quantity with a stored expectation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BettiReport {
    pub backend: String,
    pub model: Value,
    pub twist: Value,
    pub dims: Vec<usize>,
    pub euler_characteristic: i64,
    #[serde(default)]
    pub expected_euler: Option<i64>,
    pub rank_tolerance: f64,
    #[serde(default)]
    pub spectra: Vec<SpectrumEntry>,
    #[serde(default)]
    pub residuals: Vec<ResidualRecord>,
    #[serde(default)]
    pub gates: Vec<GateRecord>,
    #[serde(default)]
    pub golden: Vec<GoldenRecord>,
    #[serde(default)]
    pub scan: Vec<ScanPoint>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub timings_ms: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub passed: bool,
}

/// One point of a parameter scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub parameter: f64,
    pub dims: Vec<usize>,
    pub flagged: bool,
}

pub fn euler_sum(dims: &[usize]) -> i64 {
    dims.iter()
        .enumerate()
        .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
        .sum()
}

impl BettiReport {
    pub fn new(backend: impl Into<String>, dims: Vec<usize>, rank_tolerance: f64) -> Self {
        Self {
            backend: backend.into(),
            model: Value::Null,
            twist: Value::Null,
            euler_characteristic: euler_sum(&dims),
            dims,
            rank_tolerance,
            ..Self::default()
        }
    }

    pub fn euler_check(&self) -> bool {
        euler_sum(&self.dims) == self.euler_characteristic
            && self.expected_euler.is_none_or(|e| e == self.euler_characteristic)
    }

    /// Recomputes `passed` from residuals, golden comparisons and the Euler check.
    pub fn finalize(&mut self) -> bool {
        self.passed =
            self.residuals.iter().all(|r| r.passed) && self.golden.iter().all(|g| g.passed) && self.euler_check();
        self.passed
    }

    /// Pretty JSON with lexicographically sorted keys.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is serializable");
        serde_json::to_string_pretty(&value).expect("value is serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_json_round_trips_and_sorts_keys() {
        let mut r = BettiReport::new("torus", vec![1, 2, 1], 1e-8);
        r.residuals
            .push(ResidualRecord::new("d_squared", 1.234_567_890_123_4e-17, 1e-12));
        r.spectra.push(SpectrumEntry {
            mode: Some(vec![0, -1]),
            degree: 1,
            index: 0,
            eigenvalue: 39.478_417_604_357_43,
        });
        r.gates
            .push(GateRecord::new("positivity", false, "flat").with_value("min", 0.0));
        r.finalize();
        let text = r.to_canonical_json();
        let back = BettiReport::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_canonical_json(), text);
        let backend = text.find("\"backend\"").unwrap();
        let dims = text.find("\"dims\"").unwrap();
        assert!(backend < dims);
        assert!(r.passed);
    }

    #[test]
    fn failing_residual_fails_report() {
        let mut r = BettiReport::new("torus", vec![0, 0, 0], 1e-8);
        r.residuals.push(ResidualRecord::new("x", 1.0, 1e-12));
        assert!(!r.finalize());
        assert!(!ResidualRecord::new("nan", f64::NAN, 1.0).passed);
    }
}
