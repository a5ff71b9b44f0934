use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use semitoric::catalog::SystemInstance;
use semitoric::invariants::polygon::Cartography;
use semitoric::invariants::taylor::{taylor_invariant, TaylorOptions};
use semitoric::normalform::{eliasson_map_at, DEFAULT_DEGREE};
use semitoric::singularities::{count_focus_focus, region_map, transition_scan, SearchOptions};
use semitoric::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_with_input(BenchmarkId::new("region_map_32", name), &mode, |b, &mode| {
            b.iter(|| region_map(1.0, 2.0, black_box(32), mode).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("transition_scan_t", name), &mode, |b, &mode| {
            b.iter(|| transition_scan("t", |t| SystemInstance::cam(1.0, 1.5, t), 0.0, 1.0, black_box(200), mode).unwrap())
        });
    }
    g.finish();
}

fn taylor(c: &mut Criterion) {
    let sys = SystemInstance::cam(1.0, 1.5, 0.5).unwrap();
    let census = count_focus_focus(&sys, &SearchOptions::lattice_only()).unwrap();
    let ff = census.focus_focus().next().unwrap();
    let map = eliasson_map_at(&sys, &ff.point, DEFAULT_DEGREE).unwrap();
    let cart = Cartography::new(&sys, &census, &[1], 0).unwrap();
    let opts = TaylorOptions::default();
    let mut g = c.benchmark_group("taylor");
    for (name, mode) in MODES {
        g.bench_with_input(BenchmarkId::new("fit_24x24", name), &mode, |b, &mode| {
            b.iter(|| taylor_invariant(&cart, 0, &map, black_box(&opts), mode).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, scans, taylor);
criterion_main!(benches);
