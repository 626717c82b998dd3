use factorboot::bootstrap::{draw_weights, BootstrapWeights, WeightScheme};
use factorboot::linalg::{sample_covariance_eigs, svd_deflate, DataMatrix, WeightedSpectrum};
use factorboot::nonspiked::{critical_value, decision_fraction_nonspiked, phi1_null_samples, NullDistribution};
use factorboot::rng::{stream, Domain};
use factorboot::spiked::{decision_fraction_spiked, sigma_tilde_sq, spiked_statistic};
use factorboot::theory::*;
use factorboot::Error;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Plain bisection of a sign change to width 1e-12.
fn brute_bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    if flo == 0.0 {
        return Some(lo);
    }
    if flo.signum() == f(hi).signum() {
        return None;
    }
    while hi - lo > 1e-12 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn gaussian(p: usize, n: usize, seed: u64) -> DataMatrix {
    let mut s = stream(seed, Domain::Data, 0);
    DataMatrix::new(DMatrix::from_fn(p, n, |_, _| s.sample(StandardNormal))).unwrap()
}

#[test]
fn theta_matches_brute_force_example() {
    let spec = PopulationSpectrum::new(vec![10.0], vec![1.0, 1.0]).unwrap();
    let theta = solve_theta(&spec, 0, 4).unwrap();
    let s: f64 = 2.0 * 1.0 / (1.0 - 0.1);
    let oracle = brute_bisect(|t| t / 10.0 - 1.0 / (1.0 - s / (4.0 * t)), 10.0, 20.0).unwrap();
    assert!((theta - oracle).abs() < 1e-9, "{theta} vs {oracle}");
}

#[test]
fn theta_approaches_lambda_at_the_predicted_rate() {
    let bulk: Vec<f64> = (0..50).map(|k| 2.0 - k as f64 * 0.02).collect();
    let spec = PopulationSpectrum::new(vec![40.0], bulk.clone()).unwrap();
    let total: f64 = bulk.iter().sum();
    for n in [1_000usize, 10_000, 100_000] {
        let theta = solve_theta(&spec, 0, n).unwrap();
        // relative excess, dimensionless on both sides
        assert!(theta / 40.0 - 1.0 <= 2.0 * total / (n as f64 * 40.0));
        assert!(theta >= 40.0);
    }
}

#[test]
fn zeta_with_unit_weights_matches_bisection() {
    let spec = PopulationSpectrum::new(vec![30.0], vec![1.5, 1.0, 0.5, 0.25]).unwrap();
    let n = 12;
    let theta = solve_theta(&spec, 0, n).unwrap();
    let w = BootstrapWeights::from_values(vec![1.0; n], WeightScheme::Unit);
    let z = solve_zeta_hat(&spec, theta, &w).unwrap();
    let rhs = |zeta: f64| {
        let inner: f64 = spec.bulk().iter().map(|l| l / (1.0 - l * zeta / theta)).sum();
        1.0 / (1.0 - inner / (n as f64 * theta))
    };
    let oracle = brute_bisect(|zeta| zeta - rhs(zeta), 1.0, 2.0).unwrap();
    assert!((z - oracle).abs() < 1e-9);
    assert!(zeta_residual(&spec, theta, &w, z).abs() <= 1e-10);
}

#[test]
fn lambda0_closed_form_example() {
    let w = BootstrapWeights::from_values(vec![2.0, 1.0], WeightScheme::Multiplier);
    let l0 = solve_lambda0(&[1.0], &w, 0).unwrap();
    assert!((l0 - 2.0).abs() < 1e-12);
    let oracle = brute_bisect(|x| 0.5 / (x - 1.0) - 0.5, 1.0 + 1e-12, 10.0).unwrap();
    assert!((l0 - oracle).abs() < 1e-9);
}

#[test]
fn sigma_tilde_examples() {
    assert_eq!(sigma_tilde_sq(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
    assert_eq!(sigma_tilde_sq(&[0.5; 4]).unwrap(), 0.25);
    let mut s = stream(3, Domain::Verification, 0);
    let raw: Vec<f64> = (0..50).map(|_| s.sample(StandardNormal)).collect();
    let norm = raw.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
    let u: Vec<f64> = raw.iter().map(|v| v / norm).collect();
    let mut naive = 0.0;
    for v in &u {
        naive += v * v * v * v;
    }
    assert!((sigma_tilde_sq(&u).unwrap() - naive).abs() < 1e-14);
    assert!(matches!(sigma_tilde_sq(&[0.9, 0.0]), Err(Error::NotUnitNorm { .. })));
}

#[test]
fn spiked_statistic_examples() {
    let m = WeightScheme::Multiplier;
    assert_eq!(spiked_statistic(1.3, 1.3, 0.1, m, 0.0, 50).unwrap(), 0.0);
    assert!((spiked_statistic(1.1, 1.0, 0.04, m, 0.0, 50).unwrap() - 0.5).abs() < 1e-12);
    let s = spiked_statistic(1.05, 1.0, 0.02, WeightScheme::Standard, 0.0, 100).unwrap();
    assert!((s - 0.5).abs() < 1e-12);
    assert!(matches!(
        spiked_statistic(1.0, 1.0, 0.01, WeightScheme::Standard, 0.0, 100),
        Err(Error::DegenerateVariance { .. })
    ));
}

#[test]
fn spiked_fraction_examples() {
    assert_eq!(decision_fraction_spiked(&[0.0; 7], 0.3), 1.0);
    assert_eq!(decision_fraction_spiked(&[0.0, 10.0, -10.0, 0.0], 0.05), 0.5);
    let mut s = stream(11, Domain::Verification, 0);
    let z: Vec<f64> = (0..10_000).map(|_| s.sample(StandardNormal)).collect();
    assert!((decision_fraction_spiked(&z, 0.05) - 0.95).abs() < 0.02);
}

fn null(samples: Vec<f64>) -> NullDistribution {
    NullDistribution { samples, r_max: 0, scheme: WeightScheme::Multiplier, seed: 0 }
}

#[test]
fn critical_value_examples() {
    assert_eq!(critical_value(&null(vec![7.0; 13]), 0.37).unwrap(), 7.0);
    assert_eq!(critical_value(&null((1..=10).map(f64::from).collect()), 0.10).unwrap(), 9.0);
    let mut s = stream(5, Domain::Verification, 0);
    let u: Vec<f64> = (0..100_000).map(|_| s.random::<f64>()).collect();
    assert!((critical_value(&null(u), 0.05).unwrap() - 0.95).abs() < 0.01);
}

#[test]
fn nonspiked_fraction_examples() {
    assert_eq!(decision_fraction_nonspiked(&[0.0; 5], 1.0), 1.0);
    assert_eq!(decision_fraction_nonspiked(&[1.0, 2.0, 3.0, 4.0], 2.5), 0.5);
}

#[test]
fn fresh_null_draws_fall_below_their_own_quantile() {
    let x = gaussian(40, 60, 8);
    let alpha = 0.1;
    let d = phi1_null_samples(&x, 2, 400, WeightScheme::Multiplier, 1).unwrap();
    let c = critical_value(&d, alpha).unwrap();
    let fresh = phi1_null_samples(&x, 2, 200, WeightScheme::Multiplier, 2).unwrap();
    assert!((decision_fraction_nonspiked(&fresh.samples, c) - (1.0 - alpha)).abs() < 0.1);
}

#[test]
fn null_samples_vanish_on_exact_low_rank_data() {
    // rank 2 with min(p, n) = 3
    let a = DMatrix::from_fn(3, 2, |i, j| (i + 2 * j) as f64 + 1.0);
    let b = DMatrix::from_fn(2, 8, |i, j| ((i * 3 + j) % 5) as f64 - 2.0);
    let x = DataMatrix::new(&a * &b).unwrap();
    let d = phi1_null_samples(&x, 2, 20, WeightScheme::Multiplier, 0).unwrap();
    let top = sample_covariance_eigs(&x, 1, false).unwrap().eigenvalues[0];
    assert!(d.samples.iter().all(|&v| v <= 1e-10 * top));
}

#[test]
fn unit_weights_reproduce_the_next_sample_eigenvalue() {
    let x = gaussian(15, 25, 4);
    let d = phi1_null_samples(&x, 3, 5, WeightScheme::Unit, 0).unwrap();
    let l4 = sample_covariance_eigs(&x, 4, false).unwrap().eigenvalues[3];
    assert!(d.samples.iter().all(|v| (v - l4).abs() < 1e-10 * l4));
}

#[test]
fn companion_and_primal_spectra_agree() {
    for (p, n) in [(10, 40), (40, 10), (70, 90), (90, 70)] {
        let x = gaussian(p, n, (p * n) as u64);
        let mut s = stream(1, Domain::Verification, 0);
        let w = draw_weights(WeightScheme::Multiplier, n, &mut s).unwrap();
        let spec = WeightedSpectrum::new(&x);
        let got = spec.top_eigenvalues(w.values(), 5).unwrap();
        let xm = x.values();
        let mut direct = xm.clone();
        for (j, wj) in w.values().iter().enumerate() {
            direct.column_mut(j).scale_mut(*wj);
        }
        let m = (direct * xm.transpose()) / n as f64;
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        for i in 0..5 {
            assert!((got[i] - ev[i]).abs() <= 1e-8 * ev[0], "{p}x{n} index {i}");
        }
    }
}

#[test]
fn deflation_removes_the_leading_directions() {
    let x = gaussian(12, 30, 9);
    let full = sample_covariance_eigs(&x, 12, false).unwrap().eigenvalues;
    let d = svd_deflate(&x, 3).unwrap();
    let rest = sample_covariance_eigs(&d, 9, false).unwrap().eigenvalues;
    for i in 0..9 {
        assert!((rest[i] - full[i + 3]).abs() < 1e-10 * full[0]);
    }
}

#[test]
fn gumbel_transform_special_cases() {
    let bulk = vec![1.0; 30];
    assert!((gumbel_transform(9.0, &bulk, 30) - (8.0 - 30f64.ln())).abs() < 1e-12);
    let b2 = [2.0, 1.0, 1.0];
    let x = gumbel_center(&b2) + gumbel_scale(&b2, 7) * 7f64.ln();
    assert!(gumbel_transform(x, &b2, 7).abs() < 1e-12);
}
