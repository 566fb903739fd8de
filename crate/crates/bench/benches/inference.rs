use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use proxauth_bench::fixture;
use proxauth_core::threat::ensemble_predict;

fn inference(c: &mut Criterion) {
    let f = fixture(42).unwrap();
    let mut g = c.benchmark_group("predict_test_split");
    for m in &f.models {
        g.bench_function(m.algo.name(), |b| b.iter(|| m.predict_batch(black_box(&f.test.rows)).unwrap()));
    }
    g.finish();

    let row = f.test.rows[0].clone();
    c.bench_function("ensemble_single_row", |b| b.iter(|| ensemble_predict(&f.models, black_box(&row)).unwrap()));

    let json = f.models[0].to_json().unwrap();
    c.bench_function("model_load_json", |b| {
        b.iter_batched(|| json.clone(), |s| proxauth_core::TrainedModel::from_json(&s).unwrap(), BatchSize::SmallInput)
    });
}

criterion_group!(benches, inference);
criterion_main!(benches);
