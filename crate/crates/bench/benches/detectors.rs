use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use optwin_bench::{drifting_stream, error_stream};
use optwin_core::baselines::{AdwinConfig, DdmConfig};
use optwin_core::{Adwin, CutTable, Ddm, DriftDetector, Optwin, OptwinConfig};

fn feed(d: &mut dyn DriftDetector, xs: &[f64]) -> usize {
    xs.iter().filter(|&&x| d.add_element(black_box(x)).unwrap().is_drift()).count()
}

fn table_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("cut_table_build");
    g.sample_size(10);
    for w_max in [1_000usize, 5_000] {
        let cfg = OptwinConfig::new(0.99, 0.5, w_max).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(w_max), &cfg, |b, cfg| {
            b.iter(|| CutTable::build(black_box(cfg)).unwrap())
        });
    }
    g.finish();
}

fn optwin_throughput(c: &mut Criterion) {
    let xs = error_stream(100_000, 0.2, 1);
    let mut g = c.benchmark_group("optwin_add_element");
    g.throughput(Throughput::Elements(xs.len() as u64));
    for rho in [0.1, 0.5, 1.0] {
        let cfg = OptwinConfig::new(0.99, rho, 25_000).unwrap();
        let table = Arc::new(CutTable::build(&cfg).unwrap());
        g.bench_with_input(BenchmarkId::new("stationary", rho), &xs, |b, xs| {
            b.iter(|| {
                let mut d = Optwin::with_table(cfg, table.clone()).unwrap();
                feed(&mut d, xs)
            })
        });
    }
    let drifting = drifting_stream(100_000, 20_000, 2);
    let cfg = OptwinConfig::new(0.99, 0.5, 25_000).unwrap();
    let table = Arc::new(CutTable::build(&cfg).unwrap());
    g.bench_function("drifting/0.5", |b| {
        b.iter(|| {
            let mut d = Optwin::with_table(cfg, table.clone()).unwrap();
            feed(&mut d, &drifting)
        })
    });
    g.finish();
}

fn baselines_throughput(c: &mut Criterion) {
    let mut g = c.benchmark_group("baseline_add_element");
    for n in [10_000usize, 100_000] {
        let xs = error_stream(n, 0.2, 3);
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::new("adwin", n), &xs, |b, xs| {
            b.iter(|| feed(&mut Adwin::new(AdwinConfig::default()).unwrap(), xs))
        });
        g.bench_with_input(BenchmarkId::new("ddm", n), &xs, |b, xs| {
            b.iter(|| feed(&mut Ddm::new(DdmConfig::default()).unwrap(), xs))
        });
    }
    g.finish();
}

criterion_group!(benches, table_build, optwin_throughput, baselines_throughput);
criterion_main!(benches);
