//! Single-thread pool against the default pool on the three batch workloads.
//! `cargo bench --no-default-features` times the sequential build instead.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;

use spectrafrac::experiments::alpha_sweep;
use spectrafrac::local_dims::{measure_dims, MeasureDimParams};
use spectrafrac::measures::{cantor_measure, uniform_measure};
use spectrafrac::operators::PotentialSpec;
use spectrafrac::spectral::{resolvent_convergence_scan, Psi};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let default = rayon::current_num_threads();
    let mut out = vec![("1-thread".to_string(), ThreadPoolBuilder::new().num_threads(1).build().unwrap())];
    if default > 1 {
        out.push((format!("{default}-thread"), ThreadPoolBuilder::new().num_threads(default).build().unwrap()));
    }
    out
}

fn throughput(c: &mut Criterion) {
    let cantor = cantor_measure(14).unwrap();
    let params = MeasureDimParams::new(1e-5, 0.1);
    let uniform = uniform_measure(0.0, 1.0, 20_000).unwrap();
    let alphas: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let random = PotentialSpec::random(7, 2.0).unwrap();

    let mut group = c.benchmark_group("throughput");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("measure_dims", &name), |b| {
            b.iter(|| pool.install(|| measure_dims(black_box(&cantor), &params).unwrap()))
        });
        group.bench_function(BenchmarkId::new("classify_sweep", &name), |b| {
            b.iter(|| pool.install(|| alpha_sweep(black_box(&uniform), &alphas, 3.0, 1.0, 1e3).unwrap()))
        });
        group.bench_function(BenchmarkId::new("spectral_batch", &name), |b| {
            b.iter(|| {
                pool.install(|| {
                    resolvent_convergence_scan(black_box(&random), &[201, 401, 801, 1601], &Psi::Delta0).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, throughput);
criterion_main!(benches);
