use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ionprobe_core::*;

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("parity_scan");
    group.sample_size(10);
    for n in [8usize, 20] {
        let mut cfg = ScenarioConfig::new(n);
        cfg.grid = TimeGrid::uniform(3.0, 300).unwrap();
        group.bench_function(format!("N={n} 300 points"), |b| {
            b.iter(|| parity_scan(black_box(&cfg)).unwrap())
        });
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    group.sample_size(10);
    for n in [10usize, 20] {
        let space = build_space(n, n);
        let jcm = jcm_hamiltonian(space, 1.0).unwrap();
        group.bench_function(format!("jcm N={n}"), |b| {
            b.iter(|| Propagator::new(black_box(&jcm)).unwrap())
        });
        let probe = probe_hamiltonian(&correlation_operator(space), 1e4).unwrap();
        group.bench_function(format!("probe N={n}"), |b| {
            b.iter(|| Propagator::new(black_box(&probe)).unwrap())
        });
    }
    group.finish();
}

fn readout(c: &mut Criterion) {
    let mut group = c.benchmark_group("measurement");
    group.sample_size(10);
    let n = 20;
    let space = build_space(n, n);
    let psi = su2_coherent(space, n).unwrap();
    let obs = correlation_operator(space);
    let config = ProbeConfig::default();
    group.bench_function("direct measurement N=20", |b| {
        b.iter(|| run_direct_measurement(black_box(&psi), &obs, &config).unwrap())
    });
    group.bench_function("spectral sine N=20", |b| {
        b.iter(|| spectral_sine_expectation(black_box(&psi), &obs, 1e4, 6.67e-7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, scan, decomposition, readout);
criterion_main!(benches);
