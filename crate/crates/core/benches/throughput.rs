use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use smoothkit::fractal::{enumerate_cells, sup_estimate, SupDomain, DEFAULT_BUDGET};
use smoothkit::freq::contraction_probe;
use smoothkit::verify::{self, VerifyConfig};
use smoothkit::{AlphabetParams, Exec};

const P: AlphabetParams = AlphabetParams::ONE_THREE;

fn modes() -> Vec<(&'static str, Exec)> {
    let mut m = vec![("sequential", Exec::Sequential)];
    if Exec::parallel_available() {
        m.push(("parallel", Exec::Parallel));
    }
    m
}

fn cells(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_cells");
    for rank in [10usize, 14] {
        for (name, exec) in modes() {
            g.bench_with_input(BenchmarkId::new(name, rank), &rank, |b, &n| {
                b.iter(|| enumerate_cells(black_box(n), P, exec, DEFAULT_BUDGET).unwrap())
            });
        }
    }
    g.finish();
}

fn sup(c: &mut Criterion) {
    let mut g = c.benchmark_group("sup_estimate");
    g.sample_size(20);
    for (name, exec) in modes() {
        g.bench_function(name, |b| {
            b.iter(|| {
                sup_estimate(black_box(10), SupDomain::Half, P, exec, DEFAULT_BUDGET).unwrap()
            })
        });
    }
    g.finish();
}

fn probe(c: &mut Criterion) {
    let mut g = c.benchmark_group("contraction_probe");
    g.sample_size(20);
    for (name, exec) in modes() {
        g.bench_function(name, |b| {
            b.iter(|| contraction_probe(P, black_box(100_000), 0, exec))
        });
    }
    g.finish();
}

fn suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    for (name, exec) in modes() {
        let cfg = VerifyConfig {
            exec,
            ..VerifyConfig::default()
        };
        g.bench_function(name, |b| b.iter(|| verify::run(cfg)));
    }
    g.finish();
}

criterion_group!(benches, cells, sup, probe, suite);
criterion_main!(benches);
