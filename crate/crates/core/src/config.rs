use serde::{Deserialize, Serialize};

use crate::bootstrap::WeightScheme;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Tuning shared by the bootstrap decision rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    /// Upper bound on the number of factors tested.
    pub r_max: usize,
    /// Significance level of each individual test.
    pub alpha: f64,
    /// Bootstrap replicates behind each decision fraction.
    #[serde(rename = "B")]
    pub b: usize,
    /// Null-distribution draws for the thresholding critical value.
    #[serde(rename = "R")]
    pub r: usize,
    /// Decision threshold on the acceptance fractions.
    pub c_th: f64,
    /// Weight scheme for the thresholding method; the spiked tests pick
    /// their scheme per method.
    pub scheme: WeightScheme,
    pub seed: u64,
    /// Cap on the recursive refinement of `r_max` in the thresholding method.
    pub recursive_max_iters: usize,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            r_max: 8,
            alpha: 0.05,
            b: 200,
            r: 400,
            c_th: 0.475,
            scheme: WeightScheme::Multiplier,
            seed: 0,
            recursive_max_iters: 10,
            exec: Exec::default(),
        }
    }
}

impl TestConfig {
    /// Sets `alpha` and moves `c_th` to the midpoint `(1 - alpha) / 2`.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self.c_th = (1.0 - alpha) / 2.0;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_r_max(mut self, r_max: usize) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        if !(self.c_th > 0.0 && self.c_th < 1.0 - self.alpha) {
            return Err(Error::Config(format!(
                "c_th = {} must lie in (0, 1 - alpha = {})",
                self.c_th,
                1.0 - self.alpha
            )));
        }
        if self.b == 0 {
            return Err(Error::Config("B must be at least 1".into()));
        }
        if self.r == 0 {
            return Err(Error::Config("R must be at least 1".into()));
        }
        if self.recursive_max_iters == 0 {
            return Err(Error::Config("recursive_max_iters must be at least 1".into()));
        }
        Ok(())
    }
}
