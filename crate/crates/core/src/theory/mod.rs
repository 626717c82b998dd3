//! Random-matrix quantities behind the tests, and checks of their limits.

mod fixed_point;
mod gumbel;
mod roots;
pub mod verify;

pub use fixed_point::{
    lambda0_residual, solve_lambda0, solve_theta, solve_zeta_hat, theta_residual, zeta_residual,
};
pub use gumbel::{
    gumbel_center, gumbel_inverse, gumbel_scale, gumbel_transform, lambda0_approx, xi_gaussian, xi_iid,
};
pub use roots::{bracketed_root, RESIDUAL_TOL};

use serde::Serialize;

use crate::bootstrap::BootstrapWeights;
use crate::error::{Error, Result};

/// Spiked and bulk population eigenvalues, both descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationSpectrum {
    spikes: Vec<f64>,
    bulk: Vec<f64>,
}

/// Minimum relative gap between consecutive spikes before a warning.
const SPIKE_GAP: f64 = 0.01;

impl PopulationSpectrum {
    pub fn new(spikes: Vec<f64>, bulk: Vec<f64>) -> Result<Self> {
        let descending = |v: &[f64]| v.windows(2).all(|w| w[0] >= w[1]);
        if spikes.iter().chain(&bulk).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("population eigenvalues must be finite and non-negative".into()));
        }
        if !descending(&spikes) || !descending(&bulk) {
            return Err(Error::Config("population eigenvalues must be sorted in descending order".into()));
        }
        Ok(Self { spikes, bulk })
    }

    /// Splits a full descending spectrum after its first `r` entries.
    pub fn split(eigenvalues: &[f64], r: usize) -> Result<Self> {
        if r > eigenvalues.len() {
            return Err(Error::Dimension(format!("cannot take {r} spikes from {} values", eigenvalues.len())));
        }
        Self::new(eigenvalues[..r].to_vec(), eigenvalues[r..].to_vec())
    }

    pub fn spikes(&self) -> &[f64] {
        &self.spikes
    }

    pub fn bulk(&self) -> &[f64] {
        &self.bulk
    }

    /// `tr Lambda_2`.
    pub fn bulk_trace(&self) -> f64 {
        self.bulk.iter().sum()
    }

    /// Shape problems that do not stop the solvers but weaken the theory.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, w) in self.spikes.windows(2).enumerate() {
            if w[0] < (1.0 + SPIKE_GAP) * w[1] {
                out.push(format!("spikes {} and {} are closer than a {SPIKE_GAP} relative gap", i + 1, i + 2));
            }
        }
        if let (Some(&s), Some(&b)) = (self.spikes.last(), self.bulk.first()) {
            if s <= b {
                out.push("smallest spike does not exceed the bulk".into());
            }
        }
        out
    }
}

/// Every fixed-point quantity available for one spectrum and weight draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheorySolution {
    pub theta: Vec<f64>,
    pub zeta_hat: Vec<f64>,
    pub lambda0: Option<f64>,
    pub lambda0_deflated: Option<f64>,
    pub gumbel_center: f64,
    pub gumbel_scale: f64,
    pub xi: Vec<f64>,
}

impl TheorySolution {
    /// Gaussian data is assumed for `xi`. Weight-dependent quantities are
    /// left empty without `w`.
    pub fn solve(spec: &PopulationSpectrum, n: usize, w: Option<&BootstrapWeights>, deflate_k: usize) -> Result<Self> {
        let theta = (0..spec.spikes().len())
            .map(|i| solve_theta(spec, i, n).map_err(|e| e.at_index(i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let (zeta_hat, lambda0, lambda0_deflated) = match w {
            Some(w) => {
                let zeta = theta
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| solve_zeta_hat(spec, t, w).map_err(|e| e.at_index(i + 1)))
                    .collect::<Result<Vec<_>>>()?;
                let l0 = solve_lambda0(spec.bulk(), w, 0)?;
                let l0k = solve_lambda0(spec.bulk(), w, deflate_k)?;
                (zeta, Some(l0), Some(l0k))
            }
            None => (Vec::new(), None, None),
        };
        Ok(Self {
            theta,
            zeta_hat,
            lambda0,
            lambda0_deflated,
            gumbel_center: gumbel_center(spec.bulk()),
            gumbel_scale: gumbel_scale(spec.bulk(), n),
            xi: vec![xi_gaussian(); spec.spikes().len()],
        })
    }
}
