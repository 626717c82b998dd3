//! Empirical checks of the limit theorems on simulated or supplied data.

use serde::Serialize;

use super::gumbel::gumbel_transform;
use crate::bootstrap::{spectrum_batch, WeightScheme};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{sample_covariance_eigs, DataMatrix, WeightedSpectrum};
use crate::nonspiked::{critical_value, phi1_null_samples_with};
use crate::rng::{self, child_seed, Domain};
use crate::simulation::{draw_loadings, generate_dgp, population_eigenvalues, DgpParams, N_FACTORS};
use crate::spiked::{statistic_scale, SpikedTestState};
use crate::stats::{empirical_cdf, gumbel_cdf, ks_distance, normal_cdf};

/// Evenly spaced grid on `[lo, hi]` with `points >= 2` entries.
pub fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|i| lo + step * i as f64).collect()
}

/// Standardised bootstrap statistics of one spiked eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianCheck {
    pub index: usize,
    pub scheme: WeightScheme,
    pub statistics: Vec<f64>,
    /// Distance to the standard normal CDF.
    pub ks: f64,
}

impl GaussianCheck {
    /// `P*(statistic <= s)` on `grid`.
    pub fn tail_curve(&self, grid: &[f64]) -> Vec<f64> {
        empirical_cdf(&self.statistics, grid)
    }
}

/// Draws `b` statistics `(lambda_hat_i / lambda_tilde_i - 1) / s` for the
/// 1-based index `i` and measures their distance to N(0, 1).
pub fn verify_gaussian_limit(
    x: &DataMatrix,
    i: usize,
    scheme: WeightScheme,
    b: usize,
    seed: u64,
    exec: Exec,
) -> Result<GaussianCheck> {
    if i == 0 || i >= x.min_dim() {
        return Err(Error::Dimension(format!("index {i} outside 1..{}", x.min_dim())));
    }
    if b == 0 {
        return Err(Error::Config("B must be at least 1".into()));
    }
    let state = SpikedTestState::from_data(x, i)?;
    let (lt, s2) = (state.lambda_tilde[i - 1], state.sigma_tilde_sq[i - 1]);
    let s = statistic_scale(s2, scheme, state.n)
        .filter(|_| lt > 0.0)
        .ok_or(Error::DegenerateVariance { index: i, value: s2 })?;
    let batch = spectrum_batch(&WeightedSpectrum::new(x), scheme, b, i, seed, Domain::Verification, exec)?;
    let statistics: Vec<f64> = batch.iter().map(|row| (row[i - 1] / lt - 1.0) / s).collect();
    let ks = ks_distance(&statistics, normal_cdf);
    Ok(GaussianCheck { index: i, scheme, statistics, ks })
}

/// Standardised largest bootstrapped eigenvalues of factor-free data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GumbelCheck {
    pub transforms: Vec<f64>,
    /// Distance to `exp(-exp(-x))`.
    pub ks: f64,
}

/// Multiplier-bootstrap draws of the top eigenvalue of `x`, standardised
/// with the population `bulk`.
pub fn verify_gumbel(x: &DataMatrix, bulk: &[f64], draws: usize, seed: u64, exec: Exec) -> Result<GumbelCheck> {
    if bulk.len() != x.p() {
        return Err(Error::Dimension(format!("bulk has {} values for p = {}", bulk.len(), x.p())));
    }
    if draws == 0 {
        return Err(Error::Config("need at least one draw".into()));
    }
    let batch = spectrum_batch(&WeightedSpectrum::new(x), WeightScheme::Multiplier, draws, 1, seed, Domain::Verification, exec)?;
    let n = x.n();
    let transforms: Vec<f64> = batch.iter().map(|row| gumbel_transform(row[0], bulk, n)).collect();
    let ks = ks_distance(&transforms, gumbel_cdf);
    Ok(GumbelCheck { transforms, ks })
}

/// Bootstrap and sampling tail probabilities of one spiked eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasCurves {
    pub index: usize,
    pub scheme: WeightScheme,
    pub grid: Vec<f64>,
    /// Averaged `P*(sqrt(n) (lambda_hat - lambda_tilde) / lambda <= s)`.
    pub bootstrap: Vec<f64>,
    /// Frequency of `sqrt(n) (lambda_tilde - lambda) / lambda <= s`.
    pub benchmark: Vec<f64>,
    pub theory_bootstrap: Vec<f64>,
    pub theory_benchmark: Vec<f64>,
    pub lambda: f64,
    pub bulk_trace: f64,
    pub reps: usize,
}

/// Settings of a bias experiment; the data design must carry factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasSetup {
    pub dgp: DgpParams,
    /// 1-based eigenvalue index.
    pub index: usize,
    pub scheme: WeightScheme,
    pub reps: usize,
    pub b: usize,
    pub grid: Vec<f64>,
}

/// Limits of both tail probabilities for Gaussian data (`xi = 2`).
pub fn bias_theory(setup: &BiasSetup, lambda: f64, bulk_trace: f64) -> (Vec<f64>, Vec<f64>) {
    let n = setup.dgp.n as f64;
    let xi = 2.0;
    let xi_boot = match setup.scheme {
        WeightScheme::Standard => xi,
        _ => xi + 1.0,
    };
    let ratio = bulk_trace / (n * lambda);
    let m3 = setup.scheme.third_moment_excess(setup.dgp.n);
    let shift_boot = (n / xi_boot).sqrt() * ratio * ratio * m3;
    let shift_bench = (n / xi).sqrt() * ratio;
    let boot = setup.grid.iter().map(|s| normal_cdf(s / xi_boot.sqrt() - shift_boot)).collect();
    let bench = setup.grid.iter().map(|s| normal_cdf(s / xi.sqrt() - shift_bench)).collect();
    (boot, bench)
}

/// Holds the loadings fixed, redraws factors and noise `reps` times, and
/// compares the bootstrap distribution with the sampling distribution.
pub fn verify_bias(setup: &BiasSetup, seed: u64, exec: Exec) -> Result<BiasCurves> {
    let i = setup.index;
    if setup.dgp.vartheta == 0.0 || i == 0 || i > N_FACTORS {
        return Err(Error::Config(format!("index {i} must name one of the {N_FACTORS} factors")));
    }
    if setup.reps == 0 || setup.b == 0 {
        return Err(Error::Config("reps and B must be at least 1".into()));
    }
    let mut params = setup.dgp.clone();
    params.loading_seed.get_or_insert(child_seed(seed, u64::MAX, 0));
    params.validate()?;
    let loadings = draw_loadings(&params, &mut rng::stream(seed, Domain::Loadings, 0));
    let pop = population_eigenvalues(&params, &loadings);
    let lambda = pop[i - 1];
    let bulk_trace: f64 = pop[N_FACTORS..].iter().sum();
    let root_n = (params.n as f64).sqrt();

    let per_rep = exec.try_map(setup.reps, |rep| {
        let s = child_seed(seed, rep as u64, 1);
        let x = generate_dgp(&params, &mut rng::stream(s, Domain::Data, 0))?;
        let lt = sample_covariance_eigs(&x, i, false)?.eigenvalues[i - 1];
        let batch = spectrum_batch(&WeightedSpectrum::new(&x), setup.scheme, setup.b, i, s, Domain::BootstrapBatch, Exec::Serial)?;
        let boot: Vec<f64> = batch.iter().map(|row| root_n * (row[i - 1] - lt) / lambda).collect();
        Ok::<_, Error>((empirical_cdf(&boot, &setup.grid), root_n * (lt - lambda) / lambda))
    })?;

    let reps = per_rep.len() as f64;
    let mut bootstrap = vec![0.0; setup.grid.len()];
    for (curve, _) in &per_rep {
        for (acc, v) in bootstrap.iter_mut().zip(curve) {
            *acc += v / reps;
        }
    }
    let sample: Vec<f64> = per_rep.iter().map(|(_, v)| *v).collect();
    let benchmark = empirical_cdf(&sample, &setup.grid);
    let (theory_bootstrap, theory_benchmark) = bias_theory(setup, lambda, bulk_trace);
    Ok(BiasCurves {
        index: i,
        scheme: setup.scheme,
        grid: setup.grid.clone(),
        bootstrap,
        benchmark,
        theory_bootstrap,
        theory_benchmark,
        lambda,
        bulk_trace,
        reps: setup.reps,
    })
}

/// Share of fresh bootstrap draws of `lambda_hat_{r_max + 1}` falling below
/// the null critical value, per significance level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveragePoint {
    pub alpha: f64,
    pub critical_value: f64,
    pub below: f64,
}

pub fn threshold_coverage(
    x: &DataMatrix,
    r_max: usize,
    alphas: &[f64],
    r: usize,
    b: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<CoveragePoint>> {
    let null = phi1_null_samples_with(x, r_max, r, WeightScheme::Multiplier, seed, exec)?;
    let k = r_max + 1;
    let batch = spectrum_batch(&WeightedSpectrum::new(x), WeightScheme::Multiplier, b, k, seed, Domain::Verification, exec)?;
    alphas
        .iter()
        .map(|&alpha| {
            let c = critical_value(&null, alpha)?;
            let below = batch.iter().filter(|row| row[k - 1] < c).count() as f64 / b as f64;
            Ok(CoveragePoint { alpha, critical_value: c, below })
        })
        .collect()
}
