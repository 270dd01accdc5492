use criterion::{black_box, criterion_group, criterion_main, Criterion};

use phlo_bench::{default_quadrature, default_solution, smooth_pair, sweep_points};
use phlo_core::eed;
use phlo_core::fields::Event;
use phlo_core::frobenius::{self, PhLOFrame};
use phlo_core::geometry::FormValue;
use phlo_core::phlo;
use phlo_core::stress;

fn bench_exterior_algebra(c: &mut Criterion) {
    let f = FormValue::new(2, vec![0.3, -1.2, 0.7, 2.5, -0.4, 1.1]);
    let g = FormValue::new(1, vec![0.5, -0.2, 0.9, 0.1]);
    let x = [0.4, -1.1, 0.3, 0.8];
    c.bench_function("hodge of a 2-form value", |b| {
        b.iter(|| black_box(&f).hodge())
    });
    c.bench_function("wedge 1x2 values", |b| {
        b.iter(|| black_box(&g).wedge(black_box(&f)).unwrap())
    });
    c.bench_function("interior product on a 2-form", |b| {
        b.iter(|| black_box(&f).interior(black_box(x)).unwrap())
    });
    c.bench_function("energy tensor from a 2-form value", |b| {
        b.iter(|| stress::energy_tensor(black_box(&f)))
    });
}

fn bench_residual_sweeps(c: &mut Criterion) {
    let sol = default_solution();
    let state = sol.to_eb_state();
    let points = sweep_points(256);
    c.bench_function("motion residual sweep (256 events)", |b| {
        b.iter(|| {
            let mut worst = 0.0f64;
            for &p in &points {
                let (ru, rp) = phlo::motion_residual_scalar(black_box(&sol), p);
                worst = worst.max(ru.abs()).max(rp.abs());
            }
            worst
        })
    });
    c.bench_function("balance residual sweep (256 events)", |b| {
        b.iter(|| {
            let mut worst = 0.0f64;
            for &p in &points {
                worst = worst.max(eed::residual_report(black_box(&state), p).max_abs);
            }
            worst
        })
    });
    let (u, p) = smooth_pair();
    let frame = PhLOFrame::new(u, p, 1.0);
    let at = Event::new(0.3, -0.4, 0.8, 0.2);
    c.bench_function("curvature-energy relation battery", |b| {
        b.iter(|| frobenius::curvature_energy_relations(black_box(&frame), at).unwrap())
    });
}

fn bench_quadrature(c: &mut Criterion) {
    let sol = default_solution();
    let quad = default_quadrature(41);
    c.bench_function("integral energy (41^3 nodes)", |b| {
        b.iter(|| phlo::integral_energy(black_box(&sol), &quad, 0.0).unwrap())
    });
}

criterion_group!(
    benches,
    bench_exterior_algebra,
    bench_residual_sweeps,
    bench_quadrature
);
criterion_main!(benches);
