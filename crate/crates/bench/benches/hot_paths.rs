//! Benchmarks for the evaluation-heavy code paths: Bessel series, the
//! explicit transition density, Weyl-group closure, the peak solver, and
//! simulator stepping throughput.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use dunkl_core::exact1d::{ln_bessel_i, ln_tpd_b1};
use dunkl_core::potential::peak_set;
use dunkl_core::simulate::{run_ensemble, InitialCondition, SimConfig};
use dunkl_core::{RootSystem, Vector};

fn bessel(c: &mut Criterion) {
    c.bench_function("ln_bessel_i series nu=3.5 z=12", |b| {
        b.iter(|| ln_bessel_i(black_box(3.5), black_box(12.0)).unwrap())
    });
    c.bench_function("ln_bessel_i asymptotic nu=0.5 z=150", |b| {
        b.iter(|| ln_bessel_i(black_box(0.5), black_box(150.0)).unwrap())
    });
    c.bench_function("ln_bessel_i huge order nu=2500 z=80", |b| {
        b.iter(|| ln_bessel_i(black_box(2500.5), black_box(80.0)).unwrap())
    });
}

fn transition_density(c: &mut Criterion) {
    c.bench_function("ln_tpd_b1 beta=6", |b| {
        b.iter(|| ln_tpd_b1(black_box(10.0), black_box(7.0), black_box(2.0), black_box(6.0)).unwrap())
    });
    c.bench_function("ln_tpd_b1 beta=5000", |b| {
        b.iter(|| ln_tpd_b1(black_box(10.0), black_box(220.0), black_box(2.0), black_box(5000.0)).unwrap())
    });
}

fn group_and_peaks(c: &mut Criterion) {
    c.bench_function("weyl closure B_3 (order 48)", |b| {
        let rs = RootSystem::type_b(3, 0.5).unwrap();
        b.iter(|| rs.weyl_group().unwrap().order())
    });
    c.bench_function("weyl closure A_5 (order 720)", |b| {
        let rs = RootSystem::type_a(6).unwrap();
        b.iter(|| rs.weyl_group().unwrap().order())
    });
    c.bench_function("peak_set A_5", |b| {
        let rs = RootSystem::type_a(6).unwrap();
        b.iter(|| peak_set(&rs).unwrap().f_value)
    });
}

fn simulator(c: &mut Criterion) {
    c.bench_function("ensemble B_2 1000 paths to t=1", |b| {
        let rs = RootSystem::type_b(2, 0.5).unwrap();
        let x0 = Vector::from_column_slice(&[1.5, 0.5]);
        b.iter_batched(
            || SimConfig::new(4.0, 1.0, 1000, 1, InitialCondition::Point(x0.clone())),
            |cfg| run_ensemble(&rs, &cfg).unwrap().len(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bessel, transition_density, group_and_peaks, simulator);
criterion_main!(benches);
