use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use factorboot::bootstrap::{spectrum_batch, WeightScheme};
use factorboot::linalg::WeightedSpectrum;
use factorboot::nonspiked::phi1_null_samples_with;
use factorboot::rng::{stream, Domain};
use factorboot::simulation::{generate_dgp, DgpParams};
use factorboot::Exec;
use std::hint::black_box;

const MODES: [(&str, Exec); 2] = [("serial", Exec::Serial), ("parallel", Exec::Parallel)];

fn bootstrap_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("bootstrap_batch");
    group.sample_size(10);
    for p in [100usize, 200] {
        let x = generate_dgp(&DgpParams::new(p, p, 1.0, 0.0, 0.0), &mut stream(1, Domain::Data, 0)).unwrap();
        let spectrum = WeightedSpectrum::new(&x);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, p), &exec, |b, &exec| {
                b.iter(|| {
                    spectrum_batch(&spectrum, WeightScheme::Multiplier, 50, 8, 7, Domain::BootstrapBatch, exec).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn null_samples(c: &mut Criterion) {
    let mut group = c.benchmark_group("null_samples");
    group.sample_size(10);
    let x = generate_dgp(&DgpParams::new(150, 150, 1.0, 0.0, 0.0), &mut stream(2, Domain::Data, 0)).unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| phi1_null_samples_with(black_box(&x), 3, 100, WeightScheme::Multiplier, 5, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bootstrap_batch, null_samples);
criterion_main!(benches);
