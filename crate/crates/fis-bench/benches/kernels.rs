//! Throughput benchmarks for the numeric kernels: attractor sampling,
//! box counting, the pressure-equation solver, and the exact chain powers.

use criterion::{criterion_group, criterion_main, Criterion};
use fis_core::attractor::{box_count, chaos_game};
use fis_core::dimension::affinity_dimension;
use fis_core::furstenberg::overlap_certificate_gh;
use fis_core::markov::{canonical_group, return_counts};
use fis_core::surface::{build_massopust, InterpolationData, TriangulationSpec};
use std::hint::black_box;

fn surface_ifs() -> fis_core::SurfaceIfs {
    build_massopust(
        TriangulationSpec::new(3).unwrap(),
        &InterpolationData::center_peak(1.0),
        &[0.75; 9],
    )
    .unwrap()
}

fn bench_chaos_game(c: &mut Criterion) {
    let ifs = surface_ifs();
    let weights = vec![1.0 / 9.0; 9];
    c.bench_function("chaos_game_100k", |b| {
        b.iter(|| chaos_game(&ifs.maps, &weights, 100_000, 7, 100, 8).unwrap())
    });
}

fn bench_box_count(c: &mut Criterion) {
    let ifs = surface_ifs();
    let weights = vec![1.0 / 9.0; 9];
    let cloud = chaos_game(&ifs.maps, &weights, 200_000, 7, 100, 8).unwrap();
    let scales: Vec<f64> = (2..=5).map(|k| 3f64.powi(-k)).collect();
    c.bench_function("box_count_200k", |b| {
        b.iter(|| box_count(black_box(&cloud.points), &scales).unwrap())
    });
}

fn bench_affinity_solver(c: &mut Criterion) {
    let s = [0.71, 0.74, 0.77, 0.8, 0.83, 0.86, 0.89, 0.92, 0.95];
    let lambda = vec![1.0 / 3.0; 9];
    c.bench_function("affinity_dimension", |b| {
        b.iter(|| affinity_dimension(black_box(&s), &lambda).unwrap())
    });
}

fn bench_certificate(c: &mut Criterion) {
    c.bench_function("overlap_certificate_4map", |b| {
        b.iter(|| overlap_certificate_gh(black_box(0.82)).unwrap())
    });
}

fn bench_chain_powers(c: &mut Criterion) {
    let group = canonical_group();
    c.bench_function("return_counts_n8", |b| {
        b.iter(|| return_counts(black_box(&group), 8).unwrap())
    });
}

criterion_group!(
    benches,
    bench_chaos_game,
    bench_box_count,
    bench_affinity_solver,
    bench_certificate,
    bench_chain_powers
);
criterion_main!(benches);
