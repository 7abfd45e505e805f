use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use salem_core::{bianchi_census, count_salem_deg4, count_sr, count_system, omega};

fn rational(c: &mut Criterion) {
    let mut g = c.benchmark_group("rational");
    for q in [250i64, 1_000] {
        g.bench_with_input(BenchmarkId::new("deg4", q), &q, |b, &q| {
            b.iter(|| count_salem_deg4(black_box(q)).unwrap())
        });
    }
    for q in [10_000i64, 40_000] {
        g.bench_with_input(BenchmarkId::new("sr", q), &q, |b, &q| {
            b.iter(|| count_sr(black_box(q)).unwrap())
        });
    }
    g.finish();
}

fn bianchi(c: &mut Criterion) {
    let mut g = c.benchmark_group("bianchi");
    for d in [1i64, 3, 7] {
        g.bench_with_input(BenchmarkId::new("q1e7", d), &d, |b, &d| {
            b.iter(|| bianchi_census(black_box(d), 10_000_000).unwrap().count())
        });
    }
    g.finish();
}

fn system(c: &mut Criterion) {
    let mut g = c.benchmark_group("system");
    g.sample_size(10);
    for d in [2i64, 5] {
        g.bench_with_input(BenchmarkId::new("all", d), &d, |b, &d| {
            b.iter(|| count_system(black_box(d), 500, false).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("verified", d), &d, |b, &d| {
            b.iter(|| count_system(black_box(d), 500, true).unwrap())
        });
    }
    g.finish();
}

fn constants(c: &mut Criterion) {
    c.bench_function("omega_40", |b| b.iter(|| omega(black_box(40)).unwrap()));
}

criterion_group!(benches, rational, bianchi, system, constants);
criterion_main!(benches);
