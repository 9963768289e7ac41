//! Hot-path measurements: integer normal forms, prime decomposition, ord
//! vectors, and the full duality pipeline, each on a fixed deterministic
//! workload so runs are comparable.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use nca_core::bundles::duality_check;
use nca_core::linalg::{hnf, snf, Int, IntMatrix};
use nca_core::modules::ord_of_unit;
use nca_core::orders::{preset_order, primes_above};
use nca_core::sampling::Sampler;

/// Deterministic integer matrix with entries spread over [-50, 49].
fn dense_matrix(n: usize, salt: u64) -> IntMatrix {
    let mut m = IntMatrix::zero(n, n);
    let mut state = salt.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    for i in 0..n {
        for j in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            m[(i, j)] = Int::from((state >> 33) as i64 % 50 - 25);
        }
    }
    m
}

fn bench_normal_forms(c: &mut Criterion) {
    let m = dense_matrix(8, 3);
    c.bench_function("hnf 8x8", |b| b.iter(|| hnf(black_box(&m))));
    c.bench_function("snf 8x8", |b| b.iter(|| snf(black_box(&m))));
}

fn bench_primes_above(c: &mut Criterion) {
    let m3 = preset_order("M3(Z)").unwrap();
    c.bench_function("primes_above M3(Z) p=3", |b| {
        b.iter(|| primes_above(black_box(&m3), 3).unwrap())
    });
    let hz = preset_order("hurwitz").unwrap();
    c.bench_function("primes_above hurwitz p=2", |b| {
        b.iter(|| primes_above(black_box(&hz), 2).unwrap())
    });
}

fn bench_ord_of_unit(c: &mut Criterion) {
    let order = preset_order("M2(Z)").unwrap();
    let mut s = Sampler::new(17);
    let unit = s.algebra_unit(&order).unwrap();
    c.bench_function("ord_of_unit M2(Z)", |b| {
        b.iter(|| ord_of_unit(black_box(&order), black_box(&unit)).unwrap())
    });
}

fn bench_duality(c: &mut Criterion) {
    let order = preset_order("hurwitz").unwrap();
    let mut s = Sampler::new(29);
    let v = s.free_submodule(order.algebra(), 2, 1).unwrap();
    c.bench_function("duality_check hurwitz A^2 rank 1", |b| {
        b.iter(|| duality_check(black_box(&order), black_box(&v)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_normal_forms,
    bench_primes_above,
    bench_ord_of_unit,
    bench_duality
);
criterion_main!(benches);
