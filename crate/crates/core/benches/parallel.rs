//! Sequential versus data-parallel execution of the two parallel loops:
//! entrywise matrix products and batches of round trips.
//!
//! Without the `parallel` feature both strategies run the sequential path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use elemfactor::batch::{run_batch, RoundtripCase};
use elemfactor::pipeline::Mode;
use elemfactor::random::{random_product, rng_from_seed, ProductSpec};
use elemfactor::{AlgebraConfig, Strategy};

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn matrix_products(c: &mut Criterion) {
    let mut group = c.benchmark_group("mat_mul");
    group.sample_size(10);
    for (n, d, cap) in [(3, 2, 16), (4, 3, 10)] {
        let config = AlgebraConfig::new(d, cap).unwrap();
        let spec = ProductSpec { n, config, factors: 6, degree: 2, scale: Some(0.2), complex: true };
        let (_, a) = random_product(&mut rng_from_seed(1), &spec).unwrap();
        let (_, b) = random_product(&mut rng_from_seed(2), &spec).unwrap();
        for (name, strategy) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, format!("n{n}_d{d}_cap{cap}")), &strategy, |bench, &s| {
                bench.iter(|| black_box(a.mul_with(&b, s).unwrap()))
            });
        }
    }
    group.finish();
}

fn roundtrip_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("roundtrip_batch");
    group.sample_size(10);
    let config = AlgebraConfig::new(2, 16).unwrap();
    let cases: Vec<RoundtripCase> = (0..16)
        .map(|seed| RoundtripCase {
            seed,
            spec: ProductSpec { n: 3, config, factors: 6, degree: 1, scale: None, complex: false },
            near_identity_target: Some(0.3),
            mode: Mode::NearIdentity,
            tol: 1e-8,
        })
        .collect();
    for (name, strategy) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, "16x_n3_d2"), |bench| {
            bench.iter(|| black_box(run_batch(&cases, strategy)))
        });
    }
    group.finish();
}

criterion_group!(benches, matrix_products, roundtrip_batches);
criterion_main!(benches);
