use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DataMatrix;
use crate::rng::{self, Domain};

/// Number of factors in the simulation design.
pub const N_FACTORS: usize = 3;
/// AR(1) steps discarded before the kept sample.
pub const BURN_IN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DgpVariant {
    /// `X = vartheta L Phi F^T + E` with AR(1) factors.
    #[default]
    Factor,
    /// Orthonormalised loadings, i.i.d. factors and `Phi = I`.
    Orthonormal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpParams {
    pub p: usize,
    pub n: usize,
    pub vartheta: f64,
    /// Weak-factor exponent: the third loading column is scaled by `p^{-a}`.
    pub a: f64,
    /// Noise cross-correlation; off-diagonal entries of the noise
    /// covariance are `rho / p`.
    pub rho: f64,
    pub beta_f: f64,
    /// Holds the loadings fixed across replications when set.
    #[serde(default)]
    pub loading_seed: Option<u64>,
    #[serde(default)]
    pub variant: DgpVariant,
}

impl DgpParams {
    pub fn new(p: usize, n: usize, vartheta: f64, a: f64, rho: f64) -> Self {
        Self { p, n, vartheta, a, rho, beta_f: 0.2, loading_seed: None, variant: DgpVariant::Factor }
    }

    /// Number of factors present in the data: 0 without signal.
    pub fn true_r(&self) -> usize {
        if self.vartheta == 0.0 {
            0
        } else {
            N_FACTORS
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p <= N_FACTORS || self.n < 2 {
            return Err(Error::Config(format!("need p > {N_FACTORS} and n >= 2, got p = {}, n = {}", self.p, self.n)));
        }
        if !(self.vartheta >= 0.0 && self.vartheta.is_finite()) {
            return Err(Error::Config(format!("vartheta = {} must be non-negative", self.vartheta)));
        }
        if !(0.0..0.5).contains(&self.a) {
            return Err(Error::Config(format!("a = {} must lie in [0, 0.5)", self.a)));
        }
        if !(self.rho >= 0.0 && self.rho / (self.p as f64) < 1.0) {
            return Err(Error::Config(format!("rho = {} must satisfy 0 <= rho < p", self.rho)));
        }
        if !(self.beta_f.abs() < 1.0) {
            return Err(Error::Config(format!("beta_f = {} must lie in (-1, 1)", self.beta_f)));
        }
        Ok(())
    }

    /// Factor scales `diag(1.5, 1.2, p^{-a})`.
    pub fn phi(&self) -> [f64; N_FACTORS] {
        match self.variant {
            DgpVariant::Factor => [1.5, 1.2, (self.p as f64).powf(-self.a)],
            DgpVariant::Orthonormal => [1.0; N_FACTORS],
        }
    }

    /// Eigenvalues of the compound-symmetric noise covariance: the large
    /// one first, then the repeated one.
    pub fn noise_eigenvalues(&self) -> (f64, f64) {
        let q = self.rho / self.p as f64;
        (1.0 + (self.p as f64 - 1.0) * q, 1.0 - q)
    }
}

fn normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Loadings as used by [`generate_dgp`]; orthonormalised for that variant.
pub fn draw_loadings<R: Rng + ?Sized>(params: &DgpParams, rng: &mut R) -> DMatrix<f64> {
    let l = match params.loading_seed {
        Some(seed) => normal_matrix(params.p, N_FACTORS, &mut rng::stream(seed, Domain::Loadings, 0)),
        None => normal_matrix(params.p, N_FACTORS, rng),
    };
    match params.variant {
        DgpVariant::Factor => l,
        DgpVariant::Orthonormal => l.svd(true, false).u.expect("requested"),
    }
}

/// n×3 factor path of the stationary AR(1) `f_t = beta f_{t-1} + h_t`.
fn draw_factors<R: Rng + ?Sized>(params: &DgpParams, rng: &mut R) -> DMatrix<f64> {
    let n = params.n;
    if params.variant == DgpVariant::Orthonormal {
        return normal_matrix(n, N_FACTORS, rng);
    }
    let beta = params.beta_f;
    let sd0 = (1.0 - beta * beta).sqrt().recip();
    let mut f = DMatrix::zeros(n, N_FACTORS);
    for k in 0..N_FACTORS {
        let mut x = sd0 * rng.sample::<f64, _>(StandardNormal);
        for _ in 0..BURN_IN {
            x = beta * x + rng.sample::<f64, _>(StandardNormal);
        }
        for t in 0..n {
            x = beta * x + rng.sample::<f64, _>(StandardNormal);
            f[(t, k)] = x;
        }
    }
    f
}

/// p×n noise with compound-symmetric covariance via its closed-form root
/// `s I + c 1 1^T`.
fn draw_noise<R: Rng + ?Sized>(params: &DgpParams, rng: &mut R) -> DMatrix<f64> {
    let (p, n) = (params.p, params.n);
    let mut e = normal_matrix(p, n, rng);
    if params.rho == 0.0 {
        return e;
    }
    let (big, small) = params.noise_eigenvalues();
    let s = small.sqrt();
    let c = (big.sqrt() - s) / p as f64;
    for mut col in e.column_iter_mut() {
        let shift = c * col.sum();
        col.apply(|v| *v = s * *v + shift);
    }
    e
}

/// One panel from the simulation design.
pub fn generate_dgp<R: Rng + ?Sized>(params: &DgpParams, rng: &mut R) -> Result<DataMatrix> {
    params.validate()?;
    let l = draw_loadings(params, rng);
    let f = draw_factors(params, rng);
    let mut x = draw_noise(params, rng);
    if params.vartheta != 0.0 {
        let mut lphi = l;
        for (k, s) in params.phi().iter().enumerate() {
            lphi.column_mut(k).scale_mut(params.vartheta * s);
        }
        x.gemm(1.0, &lphi, &f.transpose(), 1.0);
    }
    DataMatrix::new(x)
}

/// Descending eigenvalues of the population covariance of one column of
/// `X` given the loadings.
pub fn population_eigenvalues(params: &DgpParams, loadings: &DMatrix<f64>) -> Vec<f64> {
    let p = params.p;
    let q = params.rho / p as f64;
    let mut sigma = DMatrix::from_element(p, p, q);
    sigma.fill_diagonal(1.0);
    if params.vartheta != 0.0 {
        let var_f = match params.variant {
            DgpVariant::Factor => 1.0 / (1.0 - params.beta_f * params.beta_f),
            DgpVariant::Orthonormal => 1.0,
        };
        let mut lphi = loadings.clone();
        for (k, s) in params.phi().iter().enumerate() {
            lphi.column_mut(k).scale_mut(params.vartheta * s * var_f.sqrt());
        }
        sigma.gemm(1.0, &lphi, &lphi.transpose(), 1.0);
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(sigma).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_spectrum_closed_form() {
        let d = DgpParams::new(100, 10, 0.0, 0.0, 3.0);
        let (big, small) = d.noise_eigenvalues();
        assert!((big - 3.97).abs() < 1e-12 && (small - 0.97).abs() < 1e-12);
        let l = DMatrix::zeros(100, 3);
        let ev = population_eigenvalues(&d, &l);
        assert!((ev[0] - 3.97).abs() < 1e-10 && (ev[99] - 0.97).abs() < 1e-10);
    }

    #[test]
    fn validation_catches_bad_params() {
        assert!(DgpParams::new(100, 100, 1.0, 0.5, 0.0).validate().is_err());
        assert!(DgpParams::new(10, 100, 1.0, 0.0, 10.0).validate().is_err());
        assert!(DgpParams::new(3, 100, 1.0, 0.0, 0.0).validate().is_err());
        DgpParams::new(100, 100, 1.0, 0.25, 3.0).validate().unwrap();
    }

    #[test]
    fn same_stream_same_panel() {
        let d = DgpParams::new(20, 30, 1.0, 0.0, 1.0);
        let a = generate_dgp(&d, &mut rng::stream(4, Domain::Data, 0)).unwrap();
        let b = generate_dgp(&d, &mut rng::stream(4, Domain::Data, 0)).unwrap();
        let c = generate_dgp(&d, &mut rng::stream(4, Domain::Data, 1)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
