//! Distribution functions and goodness-of-fit helpers.

use statrs::distribution::{ContinuousCDF, Normal};

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid parameters")
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    standard_normal().cdf(x)
}

/// Standard normal quantile function; round-trip error through the CDF
/// stays below 1e-10.
pub fn normal_quantile(p: f64) -> f64 {
    standard_normal().inverse_cdf(p)
}

/// Two-sided acceptance bound `Phi^{-1}(1 - alpha / 2)`.
pub fn two_sided_critical(alpha: f64) -> f64 {
    normal_quantile(1.0 - alpha / 2.0)
}

/// Standard Gumbel CDF `exp(-exp(-x))`.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Exact one-sample Kolmogorov–Smirnov statistic of `samples` against the
/// continuous CDF `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Empirical CDF of `samples` evaluated at each grid point.
pub fn empirical_cdf(samples: &[f64], grid: &[f64]) -> Vec<f64> {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len().max(1) as f64;
    grid.iter().map(|&s| xs.partition_point(|&x| x <= s) as f64 / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_reference_values() {
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-9);
        assert!((normal_quantile(0.5)).abs() < 1e-12);
        assert!((normal_quantile(0.995) - 2.575_829_303_548_901).abs() < 1e-9);
        for p in [1e-8, 0.01, 0.2, 0.7, 0.999] {
            assert!((normal_cdf(normal_quantile(p)) - p).abs() < 1e-10);
        }
    }

    #[test]
    fn ks_of_exact_quantiles_is_half_step() {
        let b = 400;
        let xs: Vec<f64> = (0..b).map(|i| normal_quantile((i as f64 + 0.5) / b as f64)).collect();
        let d = ks_distance(&xs, normal_cdf);
        assert!(d <= 1.0 / b as f64);
        assert!((d - 0.5 / b as f64).abs() < 1e-9);
    }

    #[test]
    fn empirical_cdf_counts_ties() {
        let e = empirical_cdf(&[1.0, 2.0, 2.0, 3.0], &[0.0, 2.0, 3.0]);
        assert_eq!(e, vec![0.0, 0.75, 1.0]);
    }

    #[test]
    fn gumbel_cdf_at_zero() {
        assert!((gumbel_cdf(0.0) - (-1.0f64).exp()).abs() < 1e-15);
    }
}
