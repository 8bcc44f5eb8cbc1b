//! Sequential versus data-parallel execution of the hot paths: dense
//! products, the pointwise doubled monodromy and a reduced suite run.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xxz_core::algebra::{Gradation, ModelParams};
use xxz_core::exec::{install, Execution};
use xxz_core::lattice::{doubled_monodromy_at, transfer_matrix, LeftCase};
use xxz_core::tensor::CMatrix;
use xxz_core::verify::{run_suite, SuiteConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn random_matrix(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let data = (0..dim * dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    CMatrix::from_vec(dim, data).unwrap()
}

fn params(sites: usize) -> ModelParams {
    ModelParams::new(0.3, 0.7, 0.2, sites, Gradation::Homogeneous).unwrap()
}

fn bench_matmul(c: &mut Criterion) {
    let mut group = c.benchmark_group("matmul");
    group.sample_size(20);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for dim in [128, 256, 512] {
        let (a, b) = (random_matrix(dim, &mut rng), random_matrix(dim, &mut rng));
        for (label, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(label, dim), &dim, |bench, _| {
                bench.iter(|| install(mode, || black_box(a.matmul(&b))))
            });
        }
    }
    group.finish();
}

fn bench_monodromy(c: &mut Criterion) {
    let mut group = c.benchmark_group("doubled_monodromy_at");
    group.sample_size(20);
    let lambda = Complex64::new(0.37, 0.21);
    for sites in [6, 8] {
        let p = params(sites);
        for (label, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(label, sites), &sites, |bench, _| {
                bench.iter(|| install(mode, || black_box(doubled_monodromy_at(&p, lambda).unwrap())))
            });
        }
    }
    group.finish();
}

fn bench_transfer(c: &mut Criterion) {
    let mut group = c.benchmark_group("transfer_matrix_laurent");
    group.sample_size(10);
    let p = params(6);
    for (label, mode) in MODES {
        group.bench_function(label, |bench| {
            bench.iter(|| install(mode, || black_box(transfer_matrix(&p, LeftCase::I).unwrap())))
        });
    }
    group.finish();
}

fn bench_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_suite");
    group.sample_size(10);
    for (label, mode) in MODES {
        let cfg = SuiteConfig {
            draws: 4,
            lambda_samples: 5,
            sites: vec![1, 2, 3, 4],
            execution: mode,
            ..Default::default()
        };
        group.bench_function(label, |bench| bench.iter(|| black_box(run_suite(&cfg).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, bench_matmul, bench_monodromy, bench_transfer, bench_suite);
criterion_main!(benches);
