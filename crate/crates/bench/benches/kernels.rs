use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fks_bench::{hot_masses, hot_state, velocity_grid};
use fks_core::app::run_simulation;
use fks_core::bgk::bgk_step;
use fks_core::spectral::{precompute_kernel, SpectralConfig, SpectralWorkspace};
use fks_core::transport::{
    advance_generic_cell, fill_periodic_ghosts, update_and_shift, BlockField, GenericCell, GhostStatus,
};
use fks_core::{BgkParams, CollisionKind, Conserved, RunConfig, Stop};

fn collisions(c: &mut Criterion) {
    let mut g = c.benchmark_group("collision_per_cell");
    for n in [8, 16] {
        let vg = velocity_grid(n);
        let f = hot_masses(&vg);
        let params = BgkParams::new(0.1).unwrap();
        let prim = hot_state();
        g.bench_with_input(BenchmarkId::new("bgk", n), &n, |b, _| {
            let mut m = f.clone();
            let mut scratch = Vec::new();
            b.iter(|| bgk_step(black_box(&mut m), &prim, &params, 1e-3, &vg, &mut scratch))
        });
        let cfg = SpectralConfig::new(n, 4, 4).unwrap();
        let kernel = precompute_kernel(&cfg);
        let mut ws = SpectralWorkspace::new(&cfg, &vg).unwrap();
        let mut q = vec![0.0; vg.len()];
        g.bench_with_input(BenchmarkId::new("boltzmann", n), &n, |b, _| {
            b.iter(|| ws.q_fast(black_box(&f), &kernel, &mut q).unwrap())
        });
    }
    g.finish();
}

fn kernel_precompute(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel_precompute");
    g.sample_size(10);
    for n in [8, 16] {
        let cfg = SpectralConfig::new(n, 4, 4).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| precompute_kernel(cfg))
        });
    }
    g.finish();
}

fn transport_step(c: &mut Criterion) {
    let vg = velocity_grid(8);
    let n = [16; 3];
    let f = hot_masses(&vg);
    let mut field = BlockField::zeros(n, vg.len());
    for j in 0..field.interior_len() {
        let p = field.interior(j);
        field.cell_mut(p).copy_from_slice(&f);
    }
    let mut conserved = vec![Conserved::ZERO; field.interior_len()];
    let mut cell = GenericCell::new(&vg);
    let mut ghosts = GhostStatus::new(vg.len());
    let dx = 2.0 / 16.0;
    let dt = dx / 15.0;
    c.bench_function("transport_16c_8v", |b| {
        b.iter(|| {
            let esc = advance_generic_cell(&mut cell, dt, dx).unwrap();
            ghosts.clear();
            fill_periodic_ghosts(&mut field, &esc, &mut ghosts);
            update_and_shift(&mut conserved, &mut field, &esc, &vg, &ghosts).unwrap();
        })
    });
}

fn full_step(c: &mut Criterion) {
    let mut g = c.benchmark_group("bgk_run_16c_8v_4cycles");
    g.sample_size(10);
    for workers in [1, 2, 4] {
        let cfg = RunConfig {
            spatial_n: 16,
            velocity_n: 8,
            collision: CollisionKind::Bgk,
            stop: Stop::Cycles(4),
            workers: Some(workers),
            ..Default::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(workers), &cfg, |b, cfg| {
            b.iter(|| run_simulation(cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, collisions, kernel_precompute, transport_step, full_step);
criterion_main!(benches);
