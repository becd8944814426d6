//! Benchmarks for the hot paths: the weight recursion, the operator
//! exponential, the transport series, and the star-product law.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use liestar_bench::{cubic_flow, su2_fl};
use liestar_core::kcalc::{
    a_sequence, d_series, k_series_realization, normal_ordered_exp,
    verify_integral_recursion_capped,
};
use liestar_core::weyl::realize_generators;

fn bench_a_sequence(c: &mut Criterion) {
    let flow = cubic_flow(8);
    c.bench_function("a_sequence cubic n=2 w=8", |b| {
        b.iter(|| a_sequence(black_box(&flow), 8).unwrap())
    });

    let table = a_sequence(&flow, 8).unwrap();
    c.bench_function("integral recursion check s<=4", |b| {
        b.iter(|| verify_integral_recursion_capped(black_box(&table), 4).unwrap())
    });
}

fn bench_operator_exponential(c: &mut Criterion) {
    let flow = cubic_flow(13);
    c.bench_function("normal_ordered_exp cubic order 7", |b| {
        b.iter(|| normal_ordered_exp(black_box(&flow), 7).unwrap())
    });
}

fn bench_transport_series(c: &mut Criterion) {
    let r = su2_fl();
    c.bench_function("kseries su2_fl order 6", |b| {
        b.iter(|| k_series_realization(black_box(&r), 6).unwrap())
    });
    c.bench_function("dseries su2_fl order 6", |b| {
        b.iter(|| d_series(black_box(&r), 6).unwrap())
    });
}

fn bench_weyl_product(c: &mut Criterion) {
    let r = su2_fl();
    let gens = realize_generators(&r, 10).unwrap();
    c.bench_function("weyl commutator d_order 10", |b| {
        b.iter(|| gens[0].commutator(black_box(&gens[1])).unwrap())
    });
}

criterion_group!(
    benches,
    bench_a_sequence,
    bench_operator_exponential,
    bench_transport_series,
    bench_weyl_product
);
criterion_main!(benches);
