use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use proxauth_core::rfsim::{build_environment, generate_dataset, pair_at, scan, SimConfig};
use proxauth_core::seed::rng_from_seed;

fn simulation(c: &mut Criterion) {
    let cfg = SimConfig::default();
    let env = build_environment(&cfg, 42).unwrap();
    c.bench_function("build_environment", |b| b.iter(|| build_environment(black_box(&cfg), 42).unwrap()));

    let (login, _) = pair_at(env.workstation, 1.0, 0.3);
    let mut rng = rng_from_seed(1);
    c.bench_function("scan", |b| b.iter(|| scan(&env, black_box(&login), 0.0, &mut rng).unwrap()));

    let mut g = c.benchmark_group("generate");
    g.sample_size(10);
    g.bench_function("default_dataset", |b| {
        b.iter(|| generate_dataset(&env, cfg.n_authentic, cfg.n_unauthorized, black_box(42)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, simulation);
criterion_main!(benches);
