use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rmln_bench::fixture;
use rmln_core::{
    compute_weights, nnm_svt_baseline, prox_rmln, run_admm, svd, ProxParams, SolverConfig,
    SurrogateParams, WeightStrategy,
};
use std::hint::black_box;

fn bench_svd(c: &mut Criterion) {
    let mut group = c.benchmark_group("svd");
    for n in [64, 128, 256] {
        let (m, _) = fixture(n, 8, 0.0, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| svd(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn bench_prox(c: &mut Criterion) {
    let params = SurrogateParams::default();
    let mut group = c.benchmark_group("prox_rmln");
    for n in [64, 128] {
        let (m, _) = fixture(n, 8, 0.0, 2);
        let sigmas = svd(&m).unwrap().singular_values;
        let weights = compute_weights(&sigmas, &params, WeightStrategy::Reweighted).unwrap();
        let prox = ProxParams::new(50.0, weights, params, 5).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| prox_rmln(black_box(m), &prox, &sigmas).unwrap())
        });
    }
    group.finish();
}

fn bench_admm(c: &mut Criterion) {
    let cfg = SolverConfig {
        lambda: 1e4,
        outer_iters: 20,
        ..SolverConfig::default()
    };
    let (truth, mask) = fixture(64, 3, 0.4, 3);
    let mut group = c.benchmark_group("admm_64x64_k20");
    group.sample_size(20);
    group.bench_function("rmln", |b| {
        b.iter(|| run_admm(&truth, &mask, &cfg).unwrap())
    });
    group.bench_function("nnm", |b| {
        b.iter(|| nnm_svt_baseline(&truth, &mask, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_svd, bench_prox, bench_admm);
criterion_main!(benches);
