//! Serial vs rayon comparison of the data-parallel kernels: vector ops,
//! the scaled-norm reduction, the 2D stencils, and one full solver step.
//!
//! Requires the default `parallel` feature:
//! `cargo bench -p lejastep`

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use lejastep::integrators::SolverContext;
use lejastep::problems::{stencil, Burgers, Grid2D};
use lejastep::vecops;

const SIZES: [usize; 3] = [16_384, 65_536, 262_144];

fn bench_axpby(c: &mut Criterion) {
    let mut group = c.benchmark_group("axpby");
    for &n in &SIZES {
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos()).collect();
        group.throughput(Throughput::Bytes((n * 8 * 3) as u64));
        group.bench_with_input(BenchmarkId::new("serial", n), &n, |b, _| {
            b.iter(|| vecops::serial::axpby(black_box(1.0001), &x, black_box(0.9999), &mut y))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| vecops::parallel::axpby(black_box(1.0001), &x, black_box(0.9999), &mut y))
        });
    }
    group.finish();
}

fn bench_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("l2norm_scaled");
    for &n in &SIZES {
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        group.throughput(Throughput::Bytes((n * 8) as u64));
        group.bench_with_input(BenchmarkId::new("serial", n), &n, |b, _| {
            b.iter(|| vecops::serial::l2norm_scaled(black_box(&x)))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| vecops::parallel::l2norm_scaled(black_box(&x)))
        });
    }
    group.finish();
}

fn bench_stencils(c: &mut Criterion) {
    let mut group = c.benchmark_group("burgers_rhs");
    for &n in &[128usize, 256, 512] {
        let grid = Grid2D::new(n, n);
        let problem = Burgers::new(grid, 10.0);
        let u = problem.initial_condition();
        let mut out = vec![0.0; grid.len()];
        group.throughput(Throughput::Bytes((grid.len() * 8 * 2) as u64));
        group.bench_with_input(BenchmarkId::new("serial", n), &n, |b, _| {
            b.iter(|| stencil::serial::burgers(&grid, black_box(10.0), &u, &mut out))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| stencil::parallel::burgers(&grid, black_box(10.0), &u, &mut out))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("diff_adv_rhs");
    for &n in &[128usize, 256] {
        let grid = Grid2D::new(n, n);
        let u: Vec<f64> = (0..grid.len()).map(|i| (i as f64 * 0.01).sin()).collect();
        let mut out = vec![0.0; grid.len()];
        group.throughput(Throughput::Bytes((grid.len() * 8 * 2) as u64));
        group.bench_with_input(BenchmarkId::new("serial", n), &n, |b, _| {
            b.iter(|| stencil::serial::diffusion_advection(&grid, black_box(10.0), &u, &mut out))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| stencil::parallel::diffusion_advection(&grid, black_box(10.0), &u, &mut out))
        });
    }
    group.finish();
}

fn bench_solver_step(c: &mut Criterion) {
    // one full exprb32 step through the feature-selected (parallel) path
    let grid = Grid2D::new(128, 128);
    let problem = Burgers::new(grid, 10.0);
    let u = problem.initial_condition();
    let dt = 10.0 * problem.cfl_dt();
    let mut ctx = SolverContext::new("exprb32", grid.len()).unwrap();
    let spectrum = ctx.estimate_spectrum(&problem, &u).unwrap();
    c.bench_function("exprb32_step_128x128", |b| {
        b.iter(|| {
            ctx.step(&problem, black_box(&u), dt, &spectrum, 1e-10, 1e-14)
                .unwrap()
                .iters
        })
    });
}

fn bench_node_generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("leja_nodes");
    group.sample_size(10);
    group.bench_function("60_nodes_100k_grid", |b| {
        b.iter(|| lejastep::leja::generate_leja_nodes(black_box(60), black_box(100_001)))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_axpby,
    bench_norm,
    bench_stencils,
    bench_solver_step,
    bench_node_generation
);
criterion_main!(benches);
