//! Bootstrap test of individual spiked eigenvalues (SMD / SSD).

use crate::bootstrap::{spectrum_batch, WeightScheme};
use crate::config::TestConfig;
use crate::error::{Error, Result};
use crate::linalg::{sample_covariance_eigs, DataMatrix, WeightedSpectrum};
use crate::rng::Domain;
use crate::stats::two_sided_critical;
use crate::trace::{DecisionTrace, IndexDecision, Method, StatSummary};

/// Plug-in fourth moment `sum_j u_j^4` of a unit companion eigenvector.
pub fn sigma_tilde_sq(u: &[f64]) -> Result<f64> {
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-8) {
        return Err(Error::NotUnitNorm { norm });
    }
    Ok(u.iter().map(|v| v.powi(4)).sum())
}

/// Finite-sample bias correction, active only when p/n < 0.5.
pub fn correction_cn(sigma0_sq: f64, p: usize, n: usize) -> f64 {
    let ratio = p as f64 / n as f64;
    if ratio < 0.5 {
        2.0 * sigma0_sq * (1.0 + ratio.sqrt()).powi(2) / (n as f64).sqrt()
    } else {
        0.0
    }
}

/// Variance normaliser of the bootstrap ratio under `scheme`. `None` when it
/// is not strictly positive.
pub fn statistic_scale(sigma_sq: f64, scheme: WeightScheme, n: usize) -> Option<f64> {
    let v = match scheme {
        WeightScheme::Standard => sigma_sq - 1.0 / n as f64,
        _ => sigma_sq,
    };
    (v > 0.0).then(|| v.sqrt())
}

/// `((lambda_hat + c_n) / lambda_tilde - 1) / s`.
pub fn spiked_statistic(
    lambda_hat: f64,
    lambda_tilde: f64,
    sigma_sq: f64,
    scheme: WeightScheme,
    c_n: f64,
    n: usize,
) -> Result<f64> {
    if !(lambda_tilde > 0.0) {
        return Err(Error::DegenerateVariance { index: 0, value: lambda_tilde });
    }
    let s = statistic_scale(sigma_sq, scheme, n)
        .ok_or(Error::DegenerateVariance { index: 0, value: sigma_sq })?;
    Ok(((lambda_hat + c_n) / lambda_tilde - 1.0) / s)
}

/// Share of statistics inside the two-sided acceptance region.
pub fn decision_fraction_spiked(stats: &[f64], alpha: f64) -> f64 {
    if stats.is_empty() {
        return f64::NAN;
    }
    let q = two_sided_critical(alpha);
    stats.iter().filter(|s| s.abs() <= q).count() as f64 / stats.len() as f64
}

/// Sample-side quantities reused by every bootstrap replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikedTestState {
    pub lambda_tilde: Vec<f64>,
    pub sigma_tilde_sq: Vec<f64>,
    pub sigma0_sq: f64,
    pub c_n: f64,
    pub phi_n: f64,
    pub p: usize,
    pub n: usize,
}

impl SpikedTestState {
    pub fn from_data(x: &DataMatrix, k: usize) -> Result<Self> {
        let (p, n) = (x.p(), x.n());
        let sys = sample_covariance_eigs(x, k, true)?;
        let vecs = sys.companion_vectors.as_ref().expect("requested vectors");
        let sigma_tilde_sq = (0..k)
            .map(|i| sigma_tilde_sq(vecs.column(i).as_slice()).map_err(|e| e.at_index(i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let sigma0_sq = x.frobenius_sq() / (n * p) as f64;
        Ok(Self {
            lambda_tilde: sys.eigenvalues,
            sigma_tilde_sq,
            sigma0_sq,
            c_n: correction_cn(sigma0_sq, p, n),
            phi_n: p as f64 / n as f64,
            p,
            n,
        })
    }
}

fn method_scheme(method: Method) -> Result<WeightScheme> {
    match method {
        Method::Smd => Ok(WeightScheme::Multiplier),
        Method::Ssd => Ok(WeightScheme::Standard),
        other => Err(Error::Config(format!("{other} is not a spiked-eigenvalue method"))),
    }
}

/// Sequential spiked test: `r_hat` is one less than the first index whose
/// acceptance fraction falls to `c_th`, or `r_max` when none does.
pub fn estimate_r_spiked(x: &DataMatrix, method: Method, cfg: &TestConfig) -> Result<DecisionTrace> {
    let scheme = method_scheme(method)?;
    estimate_r_spiked_with(x, method, scheme, cfg)
}

/// As [`estimate_r_spiked`] with an explicit weight scheme. Schemes other than
/// the multiplier and standard bootstrap are diagnostic only.
pub fn estimate_r_spiked_with(
    x: &DataMatrix,
    method: Method,
    scheme: WeightScheme,
    cfg: &TestConfig,
) -> Result<DecisionTrace> {
    cfg.validate()?;
    let mut trace = DecisionTrace::empty(method, cfg);
    let k = cfg.r_max;
    if k == 0 {
        return Ok(trace);
    }
    if k >= x.min_dim() {
        return Err(Error::Dimension(format!(
            "r_max = {k} must be below min(p, n) = {}",
            x.min_dim()
        )));
    }
    let state = SpikedTestState::from_data(x, k)?;
    let spectrum = WeightedSpectrum::new(x);
    let batch = spectrum_batch(&spectrum, scheme, cfg.b, k, cfg.seed, Domain::BootstrapBatch, cfg.exec)?;

    let mut first_rejected = None;
    for i in 0..k {
        let lt = state.lambda_tilde[i];
        let s2 = state.sigma_tilde_sq[i];
        if !(lt > 0.0) {
            return Err(Error::DegenerateVariance { index: i + 1, value: lt }.at_index(i + 1));
        }
        let (d, summary) = if statistic_scale(s2, scheme, state.n).is_none() {
            trace.warnings.push(format!(
                "index {}: variance estimate {s2:.3e} leaves no room for the {scheme} correction; treated as not rejected",
                i + 1
            ));
            (1.0, None)
        } else {
            let stats = batch
                .iter()
                .map(|row| spiked_statistic(row[i], lt, s2, scheme, state.c_n, state.n))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.at_index(i + 1))?;
            (decision_fraction_spiked(&stats, cfg.alpha), StatSummary::of(&stats))
        };
        trace.per_index.push(IndexDecision {
            index: i + 1,
            d,
            lambda_tilde: Some(lt),
            sigma_tilde_sq: Some(s2),
            statistic: summary,
            critical_value: None,
        });
        if first_rejected.is_none() && d <= cfg.c_th {
            first_rejected = Some(i);
        }
    }
    trace.r_hat = match first_rejected {
        Some(i) => i,
        None => {
            trace.upper_bound_reached = true;
            trace.warnings.push(format!("upper bound r_max = {k} reached"));
            k
        }
    };
    Ok(trace)
}
