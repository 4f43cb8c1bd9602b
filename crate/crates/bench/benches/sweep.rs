use criterion::{criterion_group, criterion_main, Criterion};
use etl_core::oracle::{verify_claims, ClaimId, EnumBounds, RelationFilter, SweepOptions};

fn bounds(hist: usize, filter: RelationFilter) -> EnumBounds {
    EnumBounds {
        max_histories: hist,
        max_trees: 2,
        filter,
        ..Default::default()
    }
}

fn claims(keys: &[&str]) -> Vec<ClaimId> {
    keys.iter().map(|k| ClaimId::parse(k).unwrap()).collect()
}

fn sweeps(c: &mut Criterion) {
    let opts = SweepOptions {
        workers: 1,
        ..Default::default()
    };
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let all = claims(&["lem4", "prop9", "rem11"]);
    group.bench_function("all_frames_h3", |b| {
        b.iter(|| verify_claims(&all, &bounds(3, RelationFilter::All), &opts).unwrap())
    });
    let s5 = claims(&["prop1", "prop5", "prop7"]);
    group.bench_function("s5_h5", |b| {
        b.iter(|| verify_claims(&s5, &bounds(5, RelationFilter::S5), &opts).unwrap())
    });
    let intro = claims(&["prop10", "thm12", "obs13", "lem14"]);
    group.bench_function("introspective_h4", |b| {
        b.iter(|| verify_claims(&intro, &bounds(4, RelationFilter::Introspective), &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
