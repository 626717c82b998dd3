//! Resampling weights and batched bootstrap eigenvalue extraction.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, Poisson, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::WeightedSpectrum;
use crate::rng::{self, Domain};

/// How the diagonal resampling weights are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// i.i.d. Exp(1).
    Multiplier,
    /// Multinomial(n; 1/n, ..., 1/n): resampling columns with replacement.
    Standard,
    /// i.i.d. Poisson(1).
    Poisson,
    /// i.i.d. Uniform(0.5, 1.5).
    Uniform,
    /// i.i.d. chi-square with one degree of freedom.
    #[serde(rename = "chisq")]
    ChiSquare,
    /// Every weight equal to one. Reproduces the un-bootstrapped covariance;
    /// used as a diagnostic.
    Unit,
}

impl WeightScheme {
    pub const ALL: [WeightScheme; 6] = [
        WeightScheme::Multiplier,
        WeightScheme::Standard,
        WeightScheme::Poisson,
        WeightScheme::Uniform,
        WeightScheme::ChiSquare,
        WeightScheme::Unit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightScheme::Multiplier => "multiplier",
            WeightScheme::Standard => "standard",
            WeightScheme::Poisson => "poisson",
            WeightScheme::Uniform => "uniform",
            WeightScheme::ChiSquare => "chisq",
            WeightScheme::Unit => "unit",
        }
    }

    /// `Var(w_j)`. For the standard bootstrap this depends on `n`.
    pub fn variance(self, n: usize) -> f64 {
        match self {
            WeightScheme::Multiplier | WeightScheme::Poisson => 1.0,
            WeightScheme::Standard => 1.0 - 1.0 / n as f64,
            WeightScheme::Uniform => 1.0 / 12.0,
            WeightScheme::ChiSquare => 2.0,
            WeightScheme::Unit => 0.0,
        }
    }

    /// `E[w^2 (w - 1)] = E w^3 - E w^2`, evaluated in closed form.
    ///
    /// Exp(1): 6 - 2. Binomial(n, 1/n): (5 - 6/n + 2/n^2) - (2 - 1/n).
    /// Poisson(1): 5 - 2. Uniform(0.5, 1.5): 5/4 - 13/12. Chi-square(1): 15 - 3.
    pub fn third_moment_excess(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            WeightScheme::Multiplier => 4.0,
            WeightScheme::Standard => 3.0 - 5.0 / n + 2.0 / (n * n),
            WeightScheme::Poisson => 3.0,
            WeightScheme::Uniform => 1.0 / 6.0,
            WeightScheme::ChiSquare => 12.0,
            WeightScheme::Unit => 0.0,
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightScheme::ALL
            .into_iter()
            .find(|w| w.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown weight scheme '{s}' (expected multiplier, standard, poisson, uniform or chisq)"
                ))
            })
    }
}

/// One draw of resampling weights and their descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapWeights {
    values: Vec<f64>,
    scheme: WeightScheme,
    sorted_order: Vec<usize>,
}

impl BootstrapWeights {
    /// Wraps explicit weights. Values are not validated here; consumers
    /// reject negative weights.
    pub fn from_values(values: Vec<f64>, scheme: WeightScheme) -> Self {
        let mut sorted_order: Vec<usize> = (0..values.len()).collect();
        // stable: ties keep index order
        sorted_order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        Self { values, scheme, sorted_order }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    /// Indices `t` with `w[t[0]] >= w[t[1]] >= ...`.
    pub fn sorted_order(&self) -> &[usize] {
        &self.sorted_order
    }

    /// Weights in descending order.
    pub fn sorted_values(&self) -> Vec<f64> {
        self.sorted_order.iter().map(|&i| self.values[i]).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.sorted_order.first().map_or(f64::NAN, |&i| self.values[i])
    }
}

/// Draws `n` weights from `scheme` using `rng`.
pub fn draw_weights<R: Rng + ?Sized>(scheme: WeightScheme, n: usize, rng: &mut R) -> Result<BootstrapWeights> {
    if n < 2 {
        return Err(Error::Dimension(format!("need n >= 2 weights, got {n}")));
    }
    let values: Vec<f64> = match scheme {
        WeightScheme::Multiplier => (0..n).map(|_| Exp1.sample(rng)).collect(),
        WeightScheme::Standard => {
            // n uniform category draws, tallied
            let mut counts = vec![0.0; n];
            for _ in 0..n {
                counts[rng.random_range(0..n)] += 1.0;
            }
            counts
        }
        WeightScheme::Poisson => {
            let d = Poisson::new(1.0).expect("valid rate");
            (0..n).map(|_| d.sample(rng)).collect()
        }
        WeightScheme::Uniform => {
            let d = Uniform::new(0.5, 1.5).expect("valid range");
            (0..n).map(|_| d.sample(rng)).collect()
        }
        WeightScheme::ChiSquare => {
            let d = ChiSquared::new(1.0).expect("valid dof");
            (0..n).map(|_| d.sample(rng)).collect()
        }
        WeightScheme::Unit => vec![1.0; n],
    };
    Ok(BootstrapWeights::from_values(values, scheme))
}

/// The weights of replicate `index` in the stream family `(seed, domain)`.
pub fn replicate_weights(scheme: WeightScheme, n: usize, seed: u64, domain: Domain, index: usize) -> Result<BootstrapWeights> {
    let mut stream = rng::stream(seed, domain, index as u64);
    draw_weights(scheme, n, &mut stream)
}

/// Top-`k` bootstrapped eigenvalues for `b` replicates; row `r` uses the
/// weights of stream `(seed, domain, r)`.
pub fn spectrum_batch(
    spectrum: &WeightedSpectrum,
    scheme: WeightScheme,
    b: usize,
    k: usize,
    seed: u64,
    domain: Domain,
    exec: Exec,
) -> Result<Vec<Vec<f64>>> {
    let n = spectrum.n();
    exec.try_map(b, |r| {
        let w = replicate_weights(scheme, n, seed, domain, r)?;
        spectrum.top_eigenvalues(w.values(), k).map_err(|e| e.in_replicate(r))
    })
}

/// Batch of `b` bootstrap replicates of the top-`k` eigenvalues of
/// `n^{-1} W^{1/2} G W^{1/2}` for a Gram matrix `G = X^T X`.
pub fn bootstrap_eig_batch(
    gram: &DMatrix<f64>,
    scheme: WeightScheme,
    b: usize,
    k: usize,
    master_seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let spectrum = WeightedSpectrum::from_gram(gram.clone())?;
    spectrum_batch(&spectrum, scheme, b, k, master_seed, Domain::BootstrapBatch, Exec::default())
}
