use factorboot::bootstrap::{draw_weights, BootstrapWeights, WeightScheme};
use factorboot::linalg::{svd_deflate, DataMatrix, WeightedSpectrum};
use factorboot::nonspiked::{critical_value, estimate_r_nonspiked, phi1_null_samples, NullDistribution};
use factorboot::rng::{stream, Domain};
use factorboot::spiked::{estimate_r_spiked, estimate_r_spiked_with, SpikedTestState};
use factorboot::theory::*;
use factorboot::{Exec, Method, TestConfig};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian(p: usize, n: usize, seed: u64) -> DataMatrix {
    let mut s = stream(seed, Domain::Data, 0);
    DataMatrix::new(DMatrix::from_fn(p, n, |_, _| s.sample(StandardNormal))).unwrap()
}

/// Gaussian noise plus `k` planted directions of strength `strength`.
fn planted(p: usize, n: usize, k: usize, strength: f64, seed: u64) -> DataMatrix {
    let mut s = stream(seed, Domain::Data, 1);
    let l = DMatrix::from_fn(p, k, |_, _| s.sample::<f64, _>(StandardNormal) * strength);
    let f = DMatrix::from_fn(n, k, |_, _| s.sample::<f64, _>(StandardNormal));
    let x = gaussian(p, n, seed).into_values() + l * f.transpose();
    DataMatrix::new(x).unwrap()
}

fn small_cfg(seed: u64) -> TestConfig {
    TestConfig { r_max: 4, b: 40, r: 60, seed, exec: Exec::Serial, ..TestConfig::default() }
}

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

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn companion_matches_direct_form(p in 2usize..=50, n in 2usize..=50, seed in any::<u64>()) {
        let x = gaussian(p, n, seed);
        let w = draw_weights(WeightScheme::Multiplier, n, &mut stream(seed, Domain::BootstrapBatch, 0)).unwrap();
        let k = p.min(n).min(4);
        let got = WeightedSpectrum::new(&x).top_eigenvalues(w.values(), k).unwrap();
        let gram = x.values().transpose() * x.values();
        let companion = WeightedSpectrum::from_gram(gram).unwrap().top_eigenvalues(w.values(), k).unwrap();
        let mut direct = x.values().clone();
        for (j, wj) in w.values().iter().enumerate() {
            direct.column_mut(j).scale_mut(*wj);
        }
        let mut ev: Vec<f64> = ((direct * x.values().transpose()) / n as f64).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        for i in 0..k {
            prop_assert!((got[i] - ev[i]).abs() <= 1e-8 * ev[0]);
            prop_assert!((companion[i] - ev[i]).abs() <= 1e-8 * ev[0]);
        }
    }

    #[test]
    fn solvers_agree_with_bisection(
        bulk in prop::collection::vec(0.05f64..2.0, 1..=50),
        spike_mult in 2.0f64..50.0,
        n in 5usize..=50,
        seed in any::<u64>(),
    ) {
        let mut bulk = bulk;
        bulk.sort_by(|a, b| b.total_cmp(a));
        let lambda = bulk[0] * spike_mult * (1.0 + bulk.len() as f64 / n as f64);
        let spec = PopulationSpectrum::new(vec![lambda], bulk.clone()).unwrap();
        let nf = n as f64;

        let theta = solve_theta(&spec, 0, n).unwrap();
        let s: f64 = bulk.iter().map(|l| l / (1.0 - l / lambda)).sum();
        let oracle = brute_bisect(|t| t / lambda - 1.0 / (1.0 - s / (nf * t)), lambda, 2.0 * lambda).unwrap();
        prop_assert!((theta - oracle).abs() <= 1e-9 * lambda.max(1.0));
        prop_assert!(theta >= lambda && theta <= 2.0 * lambda);
        prop_assert!(theta_residual(&spec, 0, n, theta).unwrap().abs() <= 1e-10);

        let w = draw_weights(WeightScheme::Multiplier, n, &mut stream(seed, Domain::BootstrapBatch, 0)).unwrap();
        let lo = w.trace() / nf;
        let rhs = |z: f64| {
            let inner: f64 = bulk.iter().map(|l| l / (1.0 - l * z / theta)).sum();
            w.values().iter().map(|wj| wj / (1.0 - wj * inner / (nf * theta))).sum::<f64>() / nf
        };
        match solve_zeta_hat(&spec, theta, &w) {
            Ok(z) => {
                prop_assert!(z >= lo && z <= 2.0 * lo);
                prop_assert!(zeta_residual(&spec, theta, &w, z).abs() <= 1e-10);
                let oracle = brute_bisect(|z| z - rhs(z), lo, 2.0 * lo);
                prop_assert!(oracle.is_some());
            }
            Err(_) => {
                // no root means no sign change, or a sign change across a pole
                let g = |z: f64| z - rhs(z);
                let straddles = g(lo).signum() != g(2.0 * lo).signum();
                if straddles {
                    let at = brute_bisect(g, lo, 2.0 * lo).unwrap();
                    prop_assert!(g(at).abs() > 1e-10);
                }
            }
        }

        let sorted = w.sorted_values();
        let t: f64 = sorted[1..].iter().map(|wj| wj / (1.0 - wj / sorted[0])).sum();
        let l0 = solve_lambda0(&bulk, &w, 0).unwrap();
        let pole = bulk[0] * t / nf;
        let h = |x: f64| bulk.iter().map(|l| l / (x - l * t / nf)).sum::<f64>() / nf - 1.0 / sorted[0];
        let hi = pole + 2.0 * sorted[0] * bulk.iter().sum::<f64>() / nf;
        let oracle = brute_bisect(h, pole * (1.0 + 1e-15) + f64::MIN_POSITIVE, hi).unwrap();
        prop_assert!(l0 >= pole);
        prop_assert!((l0 - oracle).abs() <= 1e-9 * oracle.max(1.0));
        prop_assert!(lambda0_residual(&bulk, &w, 0, l0).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn lambda0_is_homogeneous(bulk in prop::collection::vec(0.1f64..3.0, 2..30), c in 0.01f64..100.0, seed in any::<u64>()) {
        let w = draw_weights(WeightScheme::Multiplier, 20, &mut stream(seed, Domain::BootstrapBatch, 0)).unwrap();
        let scaled: Vec<f64> = bulk.iter().map(|v| v * c).collect();
        let a = solve_lambda0(&bulk, &w, 0).unwrap();
        let b = solve_lambda0(&scaled, &w, 0).unwrap();
        prop_assert!((b - c * a).abs() <= 1e-10 * (c * a).max(1.0));
    }

    #[test]
    fn deflated_lambda0_equals_truncated_bulk(bulk in prop::collection::vec(0.1f64..3.0, 3..30), k in 0usize..3, seed in any::<u64>()) {
        let mut bulk = bulk;
        bulk.sort_by(|a, b| b.total_cmp(a));
        let w = draw_weights(WeightScheme::Multiplier, 15, &mut stream(seed, Domain::BootstrapBatch, 0)).unwrap();
        let a = solve_lambda0(&bulk, &w, k).unwrap();
        let b = solve_lambda0(&bulk[k..], &w, 0).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn gumbel_inverse_round_trips(x in -10.0f64..10.0, bulk in prop::collection::vec(0.1f64..3.0, 1..40), n in 2usize..500) {
        let back = gumbel_transform(gumbel_inverse(x, &bulk, n), &bulk, n);
        prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0) * 10.0);
    }

    #[test]
    fn threshold_is_monotone_in_alpha(samples in prop::collection::vec(0.0f64..10.0, 1..200), a1 in 0.01f64..0.99, a2 in 0.01f64..0.99) {
        let d = NullDistribution { samples, r_max: 0, scheme: WeightScheme::Multiplier, seed: 0 };
        let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        prop_assert!(critical_value(&d, lo).unwrap() >= critical_value(&d, hi).unwrap());
    }

    #[test]
    fn standard_weights_sum_to_n(n in 2usize..300, seed in any::<u64>()) {
        let w = draw_weights(WeightScheme::Standard, n, &mut stream(seed, Domain::BootstrapBatch, 0)).unwrap();
        prop_assert_eq!(w.trace(), n as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn spiked_decisions_are_scale_invariant(seed in any::<u64>(), c in prop::sample::select(vec![0.1, 10.0, 3.7])) {
        let x = planted(30, 40, 2, 1.5, seed);
        let cfg = small_cfg(seed);
        for method in [Method::Smd, Method::Ssd] {
            let a = estimate_r_spiked(&x, method, &cfg).unwrap();
            let b = estimate_r_spiked(&x.scaled(c), method, &cfg).unwrap();
            prop_assert_eq!(a.r_hat, b.r_hat);
            for (da, db) in a.per_index.iter().zip(&b.per_index) {
                prop_assert_eq!(da.d, db.d);
            }
            for d in &a.per_index {
                prop_assert!((0.0..=1.0).contains(&d.d));
                prop_assert!((d.d * cfg.b as f64 - (d.d * cfg.b as f64).round()).abs() < 1e-9);
            }
            prop_assert_eq!(a.replay_r_hat(), a.r_hat);
        }
    }

    #[test]
    fn threshold_decisions_are_scale_invariant(seed in any::<u64>(), c in prop::sample::select(vec![0.1, 10.0])) {
        let x = planted(30, 40, 2, 1.5, seed);
        let cfg = small_cfg(seed);
        let a = estimate_r_nonspiked(&x, &cfg).unwrap();
        let b = estimate_r_nonspiked(&x.scaled(c), &cfg).unwrap();
        prop_assert_eq!(a.r_hat, b.r_hat);
        prop_assert!(a.r_hat <= cfg.r_max);
        prop_assert_eq!(a.replay_r_hat(), a.r_hat);
        for it in &a.iterations {
            prop_assert!(it.d.iter().all(|d| (0.0..=1.0).contains(d)));
        }
    }

    #[test]
    fn deflation_commutes_with_null_sampling(seed in any::<u64>(), k in 0usize..4) {
        let x = gaussian(20, 25, seed);
        let a = phi1_null_samples(&x, k, 30, WeightScheme::Multiplier, seed).unwrap();
        let b = phi1_null_samples(&svd_deflate(&x, k).unwrap(), 0, 30, WeightScheme::Multiplier, seed).unwrap();
        prop_assert_eq!(
            a.samples.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.samples.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn unit_weights_give_null_statistics(seed in any::<u64>()) {
        // p / n >= 1/2 switches the correction off
        let x = planted(30, 40, 2, 1.0, seed);
        let cfg = small_cfg(seed);
        let t = estimate_r_spiked_with(&x, Method::Smd, WeightScheme::Unit, &cfg).unwrap();
        for d in &t.per_index {
            prop_assert_eq!(d.d, 1.0);
            let s = d.statistic.as_ref().unwrap();
            prop_assert!(s.min.abs() < 1e-9 && s.max.abs() < 1e-9);
        }
        prop_assert!(t.upper_bound_reached);
    }

    #[test]
    fn sigma_tilde_within_fourth_moment_bounds(p in 3usize..30, n in 3usize..30, seed in any::<u64>()) {
        let x = gaussian(p, n, seed);
        let k = p.min(n) - 1;
        let st = SpikedTestState::from_data(&x, k).unwrap();
        for s in st.sigma_tilde_sq {
            prop_assert!(s >= 1.0 / n as f64 - 1e-12 && s <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn reruns_are_bit_identical() {
    let x = planted(25, 30, 2, 2.0, 17);
    let cfg = TestConfig { exec: Exec::Parallel, ..small_cfg(5) };
    let serial = TestConfig { exec: Exec::Serial, ..cfg.clone() };
    let json = |t: factorboot::DecisionTrace| serde_json::to_string(&t).unwrap();
    for m in [Method::Smd, Method::Ssd] {
        let a = json(estimate_r_spiked(&x, m, &cfg).unwrap());
        assert_eq!(a, json(estimate_r_spiked(&x, m, &cfg).unwrap()));
        assert_eq!(a, json(estimate_r_spiked(&x, m, &serial).unwrap()));
    }
    let a = json(estimate_r_nonspiked(&x, &cfg).unwrap());
    assert_eq!(a, json(estimate_r_nonspiked(&x, &serial).unwrap()));
    let bw = BootstrapWeights::from_values(vec![1.0, 3.0, 2.0], WeightScheme::Poisson);
    assert_eq!(bw.sorted_values(), vec![3.0, 2.0, 1.0]);
}
