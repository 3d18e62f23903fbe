use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use epr_core::corpus;
use epr_core::grid::{discretize, evolve_grid};
use epr_core::special::faddeeva;
use epr_core::{correlation_distinguishable, triplet_closed_form, Backend, Direction, GridConfig, Region, C64};

fn special(c: &mut Criterion) {
    c.bench_function("faddeeva", |b| b.iter(|| faddeeva(black_box(C64::new(1.3, 0.7)))));
}

fn analytic(c: &mut Criterion) {
    let desk = corpus::desk_scenario(Direction::z(), Direction::new(1.0, 0.0).unwrap(), Backend::Analytic);
    c.bench_function("analytic/desk", |b| {
        b.iter(|| correlation_distinguishable(black_box(&desk)).unwrap())
    });
    let triplet = corpus::with_regions(
        corpus::generic_triplet(),
        Region::interval(-3.0, -1.5).unwrap(),
        Region::interval(1.0, 2.5).unwrap(),
        Direction::new(0.4, 1.0).unwrap(),
        Direction::new(2.0, 4.5).unwrap(),
        Backend::Analytic,
    );
    c.bench_function("analytic/triplet_closed_form", |b| {
        b.iter(|| triplet_closed_form(black_box(&triplet)).unwrap())
    });
}

fn lattice(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid/desk");
    group.sample_size(10);
    for n in [128, 256, 512] {
        let backend = Backend::Grid(GridConfig::new(1, n, 16.0).unwrap());
        let sc = corpus::desk_scenario(Direction::z(), Direction::z(), backend);
        group.bench_with_input(BenchmarkId::from_parameter(n), &sc, |b, sc| {
            b.iter(|| correlation_distinguishable(sc).unwrap())
        });
    }
    group.finish();

    let g = GridConfig::new(1, 512, 16.0).unwrap();
    let psi = discretize(&corpus::desk_state(), &g).unwrap();
    c.bench_function("grid/evolve_512", |b| {
        b.iter(|| evolve_grid(black_box(&psi), 0.1).unwrap())
    });
}

criterion_group!(benches, special, analytic, lattice);
criterion_main!(benches);
