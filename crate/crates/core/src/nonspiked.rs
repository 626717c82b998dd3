//! Eigenvalue thresholding against a bootstrap null (ETMD).

use crate::bootstrap::{replicate_weights, spectrum_batch, WeightScheme};
use crate::config::TestConfig;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{svd_deflate, DataMatrix, WeightedSpectrum};
use crate::rng::Domain;
use crate::trace::{DecisionTrace, IndexDecision, Method, ThresholdIteration};

/// Bootstrap draws of the largest eigenvalue once the leading `r_max`
/// directions have been projected out.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    pub samples: Vec<f64>,
    pub r_max: usize,
    pub scheme: WeightScheme,
    pub seed: u64,
}

pub fn phi1_null_samples(
    x: &DataMatrix,
    r_max: usize,
    r: usize,
    scheme: WeightScheme,
    seed: u64,
) -> Result<NullDistribution> {
    phi1_null_samples_with(x, r_max, r, scheme, seed, Exec::default())
}

pub fn phi1_null_samples_with(
    x: &DataMatrix,
    r_max: usize,
    r: usize,
    scheme: WeightScheme,
    seed: u64,
    exec: Exec,
) -> Result<NullDistribution> {
    if r == 0 {
        return Err(Error::EmptyDistribution);
    }
    let deflated = svd_deflate(x, r_max)?;
    let spectrum = WeightedSpectrum::new(&deflated);
    let n = spectrum.n();
    let samples = exec.try_map(r, |j| {
        let w = replicate_weights(scheme, n, seed, Domain::NullSamples, j)?;
        let top = spectrum.top_eigenvalues(w.values(), 1).map_err(|e| e.in_replicate(j))?;
        Ok::<_, Error>(top[0])
    })?;
    Ok(NullDistribution { samples, r_max, scheme, seed })
}

/// The `ceil((1 - alpha) R)`-th smallest null draw.
pub fn critical_value(dist: &NullDistribution, alpha: f64) -> Result<f64> {
    let r = dist.samples.len();
    if r == 0 {
        return Err(Error::EmptyDistribution);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let mut s = dist.samples.clone();
    s.sort_by(f64::total_cmp);
    // tolerate (1 - alpha) R landing a hair above an integer
    let rank = (((1.0 - alpha) * r as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(s[rank.min(r) - 1])
}

/// Share of bootstrap eigenvalues strictly below `c`. An exactly vanishing
/// eigenvalue carries no signal and always counts as below.
pub fn decision_fraction_nonspiked(lambda_hats: &[f64], c: f64) -> f64 {
    if lambda_hats.is_empty() {
        return f64::NAN;
    }
    let below = lambda_hats.iter().filter(|&&l| l < c || l == 0.0).count();
    below as f64 / lambda_hats.len() as f64
}

/// Recursive thresholding estimate: each pass counts indices whose
/// eigenvalues exceed the null critical value too often, then reruns with
/// `r_max` lowered to that count until two passes agree.
pub fn estimate_r_nonspiked(x: &DataMatrix, cfg: &TestConfig) -> Result<DecisionTrace> {
    cfg.validate()?;
    let mut trace = DecisionTrace::empty(Method::Etmd, cfg);
    let k0 = cfg.r_max;
    if k0 == 0 {
        return Ok(trace);
    }
    if k0 >= x.min_dim() {
        return Err(Error::Dimension(format!(
            "r_max = {k0} must be below min(p, n) = {}",
            x.min_dim()
        )));
    }
    let spectrum = WeightedSpectrum::new(x);
    // one batch at the initial r_max serves every pass
    let batch = spectrum_batch(&spectrum, cfg.scheme, cfg.b, k0, cfg.seed, Domain::BootstrapBatch, cfg.exec)?;
    let columns: Vec<Vec<f64>> = (0..k0).map(|i| batch.iter().map(|row| row[i]).collect()).collect();

    let mut r_max = k0;
    let mut prev: Option<usize> = None;
    trace.converged = false;
    for _ in 0..cfg.recursive_max_iters {
        let null = phi1_null_samples_with(x, r_max, cfg.r, cfg.scheme, cfg.seed, cfg.exec)?;
        let c = critical_value(&null, cfg.alpha)?;
        let d: Vec<f64> = columns[..r_max].iter().map(|col| decision_fraction_nonspiked(col, c)).collect();
        let r_hat = d.iter().filter(|&&v| v < cfg.c_th).count();
        trace.iterations.push(ThresholdIteration { r_max, critical_value: c, d, r_hat });
        let next = r_hat.max(1);
        if prev == Some(r_hat) || next == r_max {
            trace.converged = true;
            break;
        }
        prev = Some(r_hat);
        r_max = next;
    }
    let last = trace.iterations.last().expect("at least one pass");
    trace.r_hat = last.r_hat;
    trace.per_index = last
        .d
        .iter()
        .enumerate()
        .map(|(i, &d)| IndexDecision {
            index: i + 1,
            d,
            lambda_tilde: None,
            sigma_tilde_sq: None,
            statistic: None,
            critical_value: Some(last.critical_value),
        })
        .collect();
    if !trace.converged {
        trace.warnings.push(format!(
            "recursion did not settle within {} passes; reporting the last estimate",
            cfg.recursive_max_iters
        ));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(samples: Vec<f64>) -> NullDistribution {
        NullDistribution { samples, r_max: 1, scheme: WeightScheme::Multiplier, seed: 0 }
    }

    #[test]
    fn critical_value_is_order_statistic() {
        let d = dist((1..=100).map(f64::from).collect());
        assert_eq!(critical_value(&d, 0.05).unwrap(), 95.0);
        assert_eq!(critical_value(&d, 0.10).unwrap(), 90.0);
        let d = dist((1..=400).map(f64::from).collect());
        assert_eq!(critical_value(&d, 0.05).unwrap(), 380.0);
        assert!(matches!(critical_value(&dist(vec![]), 0.05), Err(Error::EmptyDistribution)));
    }

    #[test]
    fn fraction_is_strict() {
        assert_eq!(decision_fraction_nonspiked(&[1.0, 2.0, 3.0, 4.0], 3.0), 0.5);
        assert_eq!(decision_fraction_nonspiked(&[0.0, 0.0], 0.0), 1.0);
    }
}
