use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hiddencomm_core::detectors::{bp_run, BpConfig};
use hiddencomm_core::exponents::{chernoff_exponent, ExponentQuery, Side};
use hiddencomm_core::model::{generate_graph, make_channel, sample_side_info};
use hiddencomm_core::tree_de::de_run;
use hiddencomm_core::{ChannelKind, SizeMode};

fn graph_generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_graph");
    for n in [1_000usize, 10_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| {
                generate_graph(n, n / 100, 0.5, 5.0 / n as f64, SizeMode::Deterministic, 1).unwrap()
            })
        });
    }
    group.finish();
}

fn belief_propagation(c: &mut Criterion) {
    let ch = make_channel(&ChannelKind::NoisyLabel(0.1)).unwrap();
    let g = generate_graph(10_000, 100, 5e-3, 5e-4, SizeMode::Deterministic, 1).unwrap();
    let side = sample_side_info(&ch, &g, 1).unwrap();
    let cfg = BpConfig::new(g.n, g.k, 10, true).unwrap();
    c.bench_function("bp_n10000_t10", |b| {
        b.iter(|| bp_run(black_box(&g), &side, &ch, &cfg).unwrap())
    });
}

fn exponent(c: &mut Criterion) {
    let ch = make_channel(&ChannelKind::NoisyLabel(0.01)).unwrap();
    let query = ExponentQuery {
        theta: 0.0,
        m1: 100.0,
        m2: 1.0,
        p: 0.04,
        q: 5e-4,
        channel: &ch,
        side: Side::QU,
    };
    c.bench_function("chernoff_exponent", |b| {
        b.iter(|| chernoff_exponent(black_box(&query)).unwrap())
    });
}

fn density_evolution(c: &mut Criterion) {
    let ch = make_channel(&ChannelKind::NoisyLabel(0.1)).unwrap();
    let nu = 99f64.ln();
    c.bench_function("de_run_t10", |b| {
        b.iter(|| de_run(black_box(0.5), nu, &ch, 10, 61).unwrap())
    });
}

criterion_group!(
    benches,
    graph_generation,
    belief_propagation,
    exponent,
    density_evolution
);
criterion_main!(benches);
