use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use seclab_core::cohomology::{h1, GammaGroup};
use seclab_core::group::{enumerate_homs, union_of_conjugates, Subgroup};
use seclab_core::instances::instances;
use seclab_core::localglobal::{decide_b, verify_equivalences};
use seclab_core::presets;

fn homs(c: &mut Criterion) {
    let s4 = presets::symmetric(4);
    let q8 = presets::quaternion();
    c.bench_function("enumerate_homs S4 -> S4", |b| b.iter(|| enumerate_homs(black_box(&s4), &s4)));
    c.bench_function("enumerate_homs Q8 -> S4", |b| b.iter(|| enumerate_homs(black_box(&q8), &s4)));
}

fn cohomology(c: &mut Criterion) {
    let gamma = presets::dihedral(4);
    let m = presets::elementary_abelian(2, 3);
    let coeffs = presets::actions(&gamma, &m);
    let coeff = coeffs.last().expect("trivial action at least").clone();
    c.bench_function("h1 D4 on C2^3", |b| b.iter(|| h1(black_box(&coeff))));
    let trivial = Arc::new(GammaGroup::trivial(&gamma, &presets::symmetric(3)));
    c.bench_function("h1 D4 on S3 (trivial)", |b| b.iter(|| h1(black_box(&trivial))));
}

fn deciders(c: &mut Criterion) {
    let sample = instances(9, 10, 16);
    let mut group = c.benchmark_group("local-global");
    group.sample_size(10).measurement_time(std::time::Duration::from_secs(15));
    group.bench_function("decide_b x10", |b| b.iter(|| sample.iter().filter(|ls| decide_b(ls).is_some()).count()));
    group.bench_function("verify_equivalences x10", |b| {
        b.iter(|| sample.iter().filter(|ls| verify_equivalences(ls).is_consistent()).count())
    });
    group.finish();
    let s4 = presets::symmetric(4);
    let sub = Subgroup::generated(&s4, &s4.generators()[..1]).expect("subgroup");
    c.bench_function("union_of_conjugates S4", |b| b.iter(|| union_of_conjugates(black_box(&sub))));
}

criterion_group!(benches, homs, cohomology, deciders);
criterion_main!(benches);
