use std::hint::black_box;

use angenent_bench::{dim, doughnut, sphere_loop};
use angenent_core::entropy::{entropy_bound, f_functional, sequence_report};
use angenent_core::orbit::{miss_angle, poincare_f};
use angenent_core::precise::extended_constants;
use angenent_core::{angenent_length, IntegratorConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn constants(c: &mut Criterion) {
    c.bench_function("entropy_bound n=2", |b| {
        b.iter(|| entropy_bound(black_box(dim(2))))
    });
    c.bench_function("entropy_bound n=1e6", |b| {
        b.iter(|| entropy_bound(black_box(dim(1_000_000))))
    });
    c.bench_function("extended_constants n=1000", |b| {
        b.iter(|| extended_constants(black_box(dim(1000))))
    });
    c.bench_function("sequence_report 1e4", |b| {
        b.iter(|| sequence_report(black_box(10_000), 1).unwrap())
    });
}

fn integration(c: &mut Criterion) {
    let mut g = c.benchmark_group("sphere loop");
    for tol in [1e-8, 1e-10, 1e-12] {
        let cfg = IntegratorConfig {
            rel_tol: tol,
            abs_tol: tol / 10.0,
            ..Default::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(tol), &cfg, |b, cfg| {
            b.iter(|| sphere_loop(dim(2), cfg))
        });
    }
    g.finish();

    let cfg = IntegratorConfig::default();
    c.bench_function("miss_angle n=2 R=0.44", |b| {
        b.iter(|| miss_angle(dim(2), black_box(0.44), &cfg))
    });
    c.bench_function("poincare_f n=2 R=2", |b| {
        b.iter(|| poincare_f(dim(2), black_box(2.0), &cfg))
    });
}

fn quadrature(c: &mut Criterion) {
    let path = doughnut(dim(2), 1).path;
    c.bench_function("angenent_length doughnut n=2", |b| {
        b.iter(|| angenent_length(dim(2), black_box(&path)))
    });
    c.bench_function("f_functional doughnut n=2", |b| {
        b.iter(|| f_functional(dim(2), black_box(&path), 0.0, 1.0, None).unwrap())
    });
}

fn shooting(c: &mut Criterion) {
    let mut g = c.benchmark_group("doughnut");
    g.sample_size(10);
    for n in [2, 3] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| doughnut(dim(n), 1))
        });
    }
    g.finish();
}

criterion_group!(benches, constants, integration, quadrature, shooting);
criterion_main!(benches);
