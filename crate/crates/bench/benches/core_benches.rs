use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use offload_bench::{bench_params, make_instance};
use offload_core::auction::{run_auction, AuctionConfig};
use offload_core::channel::{inverse_q, transmission_rate, LinkState};
use offload_core::graph::expand_graph;
use offload_core::oracle::max_weight_matching;

fn channel(c: &mut Criterion) {
    let params = bench_params();
    let link = LinkState::new(1e-12, 0.05, 2).unwrap();
    c.bench_function("transmission_rate", |b| {
        b.iter(|| transmission_rate(black_box(&params), black_box(&link)).unwrap())
    });
    c.bench_function("inverse_q", |b| {
        b.iter(|| inverse_q(black_box(1e-3)).unwrap())
    });
}

fn graph(c: &mut Criterion) {
    let inst = make_instance(30, 10, 5, 1);
    c.bench_function("expand_graph_30x10x5", |b| {
        b.iter(|| expand_graph(black_box(&inst)))
    });
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("auction");
    for (m, n, slots) in [(10usize, 5usize, 3u32), (30, 10, 5), (50, 20, 5)] {
        let inst = make_instance(m, n, slots, 2);
        let cfg = AuctionConfig {
            delta: 1e-3,
            ..Default::default()
        };
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{m}x{n}x{slots}")),
            &inst,
            |b, inst| b.iter(|| run_auction(black_box(inst), &cfg).unwrap()),
        );
    }
    group.finish();

    let inst = make_instance(30, 10, 5, 3);
    let edges = expand_graph(&inst);
    c.bench_function("max_weight_matching_30x10x5", |b| {
        b.iter(|| max_weight_matching(black_box(&edges), 30).unwrap())
    });
}

criterion_group!(benches, channel, graph, solvers);
criterion_main!(benches);
