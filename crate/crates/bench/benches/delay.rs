use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use latsample_bench::{blue, green, mixed};
use latsample_core::seed::stream;
use std::hint::black_box;

fn cdf(c: &mut Criterion) {
    let mut group = c.benchmark_group("cdf");
    for (name, model) in [("blue", blue()), ("green", green()), ("mixed6", mixed())] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &model, |b, m| {
            b.iter(|| m.cdf(black_box(82.0)))
        });
    }
    group.finish();
}

fn quantile(c: &mut Criterion) {
    let m = mixed();
    c.bench_function("quantile/mixed6/0.99", |b| {
        b.iter(|| m.quantile(black_box(0.99)))
    });
}

fn sample(c: &mut Criterion) {
    let m = blue();
    let mut rng = stream(1);
    c.bench_function("sample/blue", |b| b.iter(|| m.sample(&mut rng)));
}

criterion_group!(benches, cdf, quantile, sample);
criterion_main!(benches);
