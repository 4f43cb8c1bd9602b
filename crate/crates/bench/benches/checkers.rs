use criterion::{black_box, criterion_group, criterion_main, Criterion};
use etl_core::fixtures;
use etl_core::logic::{star_axiom, valid_on_frame};
use etl_core::recall::{self, RecallProperty};
use etl_core::relations::s5_closure;

fn recall_checkers(c: &mut Criterion) {
    let frames: Vec<_> = fixtures::all().iter().map(|f| f.frame()).collect();
    let mut group = c.benchmark_group("recall");
    for p in [
        RecallProperty::PrEe,
        RecallProperty::PrHc,
        RecallProperty::PrHcl,
        RecallProperty::Spr,
        RecallProperty::Wspr,
    ] {
        group.bench_function(p.name(), |b| {
            b.iter(|| frames.iter().filter(|f| recall::check(black_box(f), p).holds).count())
        });
    }
    group.finish();
}

fn closure_and_validity(c: &mut Criterion) {
    let f = fixtures::fig3a();
    c.bench_function("s5_closure/fig3a", |b| b.iter(|| s5_closure(black_box(&f))));
    let star = star_axiom(f.alphabet().lookup("e1").unwrap(), f.alphabet()).unwrap();
    c.bench_function("star_valid/fig3a", |b| {
        b.iter(|| valid_on_frame(black_box(&f), &star).unwrap().valid)
    });
}

criterion_group!(benches, recall_checkers, closure_and_validity);
criterion_main!(benches);
