use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use entloc::graph_states::{build_graph_state, graph_ce, Graph};
use entloc::haar::haar_state;
use entloc::localization::{lme_estimate, mea_tau_exact, measure_local, optimal_global_basis};
use entloc::spin_chain::{ground_state, TfimParams};
use entloc::{LocalBasisParams, MeasureKind, PsoConfig, SubsystemMask};

fn localization(c: &mut Criterion) {
    let psi = haar_state(10, 1, 0).unwrap();
    let a = SubsystemMask::new(10, 0..4).unwrap();
    let params = LocalBasisParams::uniform(4, 0.7, 1.3);
    c.bench_function("measure_local 10q |A|=4", |b| b.iter(|| measure_local(black_box(&psi), &a, &params).unwrap()));
    c.bench_function("mea_tau_exact 10q |A|=4", |b| b.iter(|| mea_tau_exact(black_box(&psi), &a).unwrap()));
    c.bench_function("optimal_global_basis 10q |A|=4", |b| b.iter(|| optimal_global_basis(black_box(&psi), &a).unwrap()));

    let small = haar_state(6, 2, 0).unwrap();
    let a2 = SubsystemMask::new(6, 0..2).unwrap();
    let cfg = PsoConfig { swarm_size: 20, iterations: 50, restarts: 1, ..PsoConfig::default() };
    c.bench_function("lme_estimate 6q ntangle (1000 evals)", |b| {
        b.iter(|| lme_estimate(black_box(&small), &a2, &MeasureKind::NTangle, &cfg).unwrap())
    });
}

fn graphs(c: &mut Criterion) {
    let g = Graph::path(20).unwrap();
    let s = SubsystemMask::new(20, 8..12).unwrap();
    c.bench_function("graph_ce path20 |s|=4", |b| b.iter(|| graph_ce(black_box(&g), &s).unwrap()));
    let g14 = Graph::cycle(14).unwrap();
    c.bench_function("build_graph_state cycle14", |b| b.iter(|| build_graph_state(black_box(&g14)).unwrap()));
}

fn spin_chain(c: &mut Criterion) {
    let p = TfimParams::new(9, 1.0, 1.0);
    let mut group = c.benchmark_group("tfim");
    group.sample_size(10);
    group.bench_function("ground_state N=9", |b| b.iter(|| ground_state(black_box(&p)).unwrap()));
    group.finish();
}

criterion_group!(benches, localization, graphs, spin_chain);
criterion_main!(benches);
