use criterion::{criterion_group, criterion_main, Criterion};
use latsample_bench::{blue, green, metro_topology};
use latsample_core::{route, run_heatmap, run_selection, ExperimentConfig};

fn selection(c: &mut Criterion) {
    let models = [blue(), green()];
    let config = ExperimentConfig {
        trials: 1000,
        ..ExperimentConfig::default()
    };
    let mut group = c.benchmark_group("selection");
    group.sample_size(10);
    group.bench_function("1000 trials x default sizes", |b| {
        b.iter(|| run_selection(&models, &config).unwrap())
    });
    group.finish();
}

fn heatmap(c: &mut Criterion) {
    let topo = metro_topology();
    let config = ExperimentConfig {
        sample_sizes: vec![5, 100, 2500],
        ..ExperimentConfig::default()
    };
    let mut group = c.benchmark_group("heatmap");
    group.sample_size(10);
    group.bench_function("metro 35x17", |b| {
        b.iter(|| run_heatmap(&topo, &config).unwrap())
    });
    group.finish();
}

fn routing(c: &mut Criterion) {
    let topo = metro_topology();
    c.bench_function("route/ACO01->MACO17", |b| {
        b.iter(|| route(&topo, "ACO01", "MACO17").unwrap())
    });
}

criterion_group!(benches, selection, heatmap, routing);
criterion_main!(benches);
