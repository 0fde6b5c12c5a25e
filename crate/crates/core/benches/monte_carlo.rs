use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use verhulst::parallel::{mc_moments, with_threads};
use verhulst::simulate::{simulate_terminal, ModelParams, TimeGrid};

fn terminal_moments(c: &mut Criterion) {
    let params = ModelParams::new(0.0, 1.0, 1.0).unwrap();
    let grid = TimeGrid::new(1.0, 1000).unwrap();
    let n = 20_000;
    let run = || {
        mc_moments(n, 1, 7, |rng, _, out| {
            out[0] = simulate_terminal(&params, &grid, rng).theta;
            Ok(())
        })
        .unwrap()
    };
    let mut g = c.benchmark_group("terminal_moments");
    g.sample_size(10);
    for (label, threads) in [("sequential", Some(1)), ("parallel", None)] {
        g.bench_with_input(BenchmarkId::new(label, n), &threads, |b, &threads| {
            b.iter(|| with_threads(threads, run).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, terminal_moments);
criterion_main!(benches);
