use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use snls_bench::quintic_fixture;
use snls_core::noise::{monte_carlo_exceedance, reduced_barrier, sample_path, ReducedMcParams};
use snls_core::solver::{gaussian, integrate};
use snls_core::spectral::{make_grid, Frame, SpectralOps};
use std::hint::black_box;

fn propagator(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagate");
    for (dim, n) in [(1, 256), (1, 4096), (3, 32)] {
        let grid = make_grid(dim, n, 20.0).unwrap();
        let ops = SpectralOps::new(&grid);
        let mut v = gaussian(grid, Frame::Physical, 1.0, 1.0).values;
        group.bench_with_input(BenchmarkId::from_parameter(format!("{dim}d-{n}")), &n, |b, _| {
            b.iter(|| ops.propagate(black_box(&mut v), 1e-3))
        });
    }
    group.finish();
}

fn solver_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate-100-steps");
    for frame in [Frame::Physical, Frame::Rescaled] {
        let (cfg, u0) = quintic_fixture(256, 1.0, frame, 0.05);
        let path_dt = if frame == Frame::Physical { cfg.dt } else { 0.5 * cfg.dt };
        let path = sample_path(&cfg.model, path_dt, cfg.t_end, 1).unwrap();
        group.bench_function(format!("{frame:?}").to_lowercase(), |b| {
            b.iter(|| integrate(&cfg, &path, black_box(&u0)).unwrap())
        });
    }
    group.finish();
}

fn gbm_monte_carlo(c: &mut Criterion) {
    let a = reduced_barrier(1.0, 5.0);
    let params = ReducedMcParams::default_for(1.0);
    let mut group = c.benchmark_group("exceedance-mc");
    group.sample_size(10);
    group.bench_function("s1-10k", |b| b.iter(|| monte_carlo_exceedance(1.0, a, 10_000, black_box(7), &params)));
    group.finish();
}

criterion_group!(benches, propagator, solver_steps, gbm_monte_carlo);
criterion_main!(benches);
