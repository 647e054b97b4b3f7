use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use starstat_bench::{exponential_sample, size_config};
use starstat_core::estimator::{delta_hat_pairwise, delta_hat_sorted, sigma2_hat};
use starstat_core::exact_null::{critical_table, ExactNull};
use starstat_core::montecarlo::simulate;
use std::hint::black_box;

fn estimators(c: &mut Criterion) {
    let mut group = c.benchmark_group("delta_hat");
    for n in [10, 100, 1000] {
        let s = exponential_sample(n, 7);
        group.bench_with_input(BenchmarkId::new("pairwise", n), &s, |b, s| b.iter(|| delta_hat_pairwise(black_box(s))));
        group.bench_with_input(BenchmarkId::new("sorted", n), &s, |b, s| b.iter(|| delta_hat_sorted(black_box(s))));
        group.bench_with_input(BenchmarkId::new("sigma2", n), &s, |b, s| b.iter(|| sigma2_hat(black_box(s))));
    }
    group.finish();
}

fn exact_null(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_null");
    for n in [10, 40, 60] {
        let law = ExactNull::new(n).unwrap();
        group.bench_with_input(BenchmarkId::new("cdf", n), &law, |b, law| b.iter(|| law.cdf(black_box(1.37))));
    }
    group.bench_function("critical_table_40", |b| b.iter(|| critical_table(40, &[0.01, 0.05, 0.1]).unwrap()));
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    for test in ["delta", "kochar", "link"] {
        let config = size_config(test, 40, 2_000);
        group.bench_function(test, |b| b.iter(|| simulate(black_box(&config)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, estimators, exact_null, simulation);
criterion_main!(benches);
