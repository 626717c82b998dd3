use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::TestConfig;
use crate::error::Error;

/// Factor-number estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Spiked-eigenvalue test, multiplier bootstrap, decision rule.
    #[serde(rename = "SMD")]
    Smd,
    /// Spiked-eigenvalue test, standard bootstrap, decision rule.
    #[serde(rename = "SSD")]
    Ssd,
    /// Eigenvalue thresholding, multiplier bootstrap, decision rule.
    #[serde(rename = "ETMD")]
    Etmd,
    /// Eigenvalue-ratio baseline.
    #[serde(rename = "ER")]
    Er,
    /// Information-criterion baseline.
    #[serde(rename = "IC")]
    Ic,
}

impl Method {
    pub const BOOTSTRAP: [Method; 3] = [Method::Smd, Method::Ssd, Method::Etmd];
    pub const ALL: [Method; 5] = [Method::Smd, Method::Ssd, Method::Etmd, Method::Er, Method::Ic];

    pub fn name(self) -> &'static str {
        match self {
            Method::Smd => "SMD",
            Method::Ssd => "SSD",
            Method::Etmd => "ETMD",
            Method::Er => "ER",
            Method::Ic => "IC",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

/// Per-index outcome of a decision rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDecision {
    /// 1-based eigenvalue index.
    pub index: usize,
    /// Acceptance fraction `D_i`.
    pub d: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_tilde_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic: Option<StatSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_value: Option<f64>,
}

/// Location summary of the B bootstrap statistics for one index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl StatSummary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let m = v.len();
        let median = if m % 2 == 1 { v[m / 2] } else { 0.5 * (v[m / 2 - 1] + v[m / 2]) };
        Some(Self { mean: v.iter().sum::<f64>() / m as f64, median, min: v[0], max: v[m - 1] })
    }
}

/// One pass of the recursive thresholding procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdIteration {
    pub r_max: usize,
    pub critical_value: f64,
    pub d: Vec<f64>,
    pub r_hat: usize,
}

/// Full provenance of one factor-number estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTrace {
    pub method: Method,
    pub r_hat: usize,
    pub per_index: Vec<IndexDecision>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub iterations: Vec<ThresholdIteration>,
    /// No index was rejected up to `r_max` (spiked tests).
    pub upper_bound_reached: bool,
    /// Recursion settled before the iteration cap (thresholding).
    pub converged: bool,
    pub tuning: TestConfig,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_seconds: Option<f64>,
    pub warnings: Vec<String>,
}

impl DecisionTrace {
    pub(crate) fn empty(method: Method, cfg: &TestConfig) -> Self {
        Self {
            method,
            r_hat: 0,
            per_index: Vec::new(),
            iterations: Vec::new(),
            upper_bound_reached: false,
            converged: true,
            tuning: cfg.clone(),
            seed: cfg.seed,
            runtime_seconds: None,
            warnings: Vec::new(),
        }
    }

    /// Recomputes `r_hat` from the recorded fractions using the method's rule.
    pub fn replay_r_hat(&self) -> usize {
        let c_th = self.tuning.c_th;
        match self.method {
            Method::Smd | Method::Ssd => self
                .per_index
                .iter()
                .position(|d| d.d <= c_th)
                .unwrap_or(self.per_index.len()),
            _ => self.per_index.iter().filter(|d| d.d < c_th).count(),
        }
    }
}
