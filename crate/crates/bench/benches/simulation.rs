use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qosearch_core::{
    apply_oracle, derive_params, lifted_binary_search, random_algorithm, run_full, subdivide,
    BasisLayout, Interval, StateVector, ThresholdInput,
};

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for n in [256usize, 4096] {
        let layout = BasisLayout::new(n, 2).unwrap();
        let state = StateVector::basis_state(layout, n / 2, false, 0).unwrap();
        let input = ThresholdInput::new(n, n / 3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| apply_oracle(black_box(&state), &input).unwrap())
        });
    }
    group.finish();
}

fn lifted_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("lifted_binary_search");
    for n in [16usize, 64, 256] {
        let alg = lifted_binary_search(n).unwrap();
        let input = ThresholdInput::new(n, n / 2 - 1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| run_full(&alg, black_box(&input)).unwrap())
        });
    }
    group.finish();
}

fn subdivide_step(c: &mut Criterion) {
    let params = derive_params(18.3, 8, 4).unwrap();
    let alg = random_algorithm(512, 4, 1, 7).unwrap();
    c.bench_function("subdivide/n512_T4", |b| {
        b.iter(|| subdivide(&alg, Interval::root(512), black_box(4), &params).unwrap())
    });
}

criterion_group!(benches, oracle, lifted_run, subdivide_step);
criterion_main!(benches);
