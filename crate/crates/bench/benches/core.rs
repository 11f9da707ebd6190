//! Timings of the hot paths: simulation, the Whittle contrast, Fisher quadrature,
//! kernel sweeps and the Cauchy integral.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use mfou_core::analytic::AnalyticFactorization;
use mfou_core::estimate::fisher_information;
use mfou_core::innovation::{solve_g, KernelFamily, ProfileLikelihood};
use mfou_core::simulate::simulate_ou;
use mfou_core::spectral::{periodogram, WhittleObjective};
use mfou_core::{SpectralConfig, ThetaParams};
use num_complex::Complex64;

fn theta() -> ThetaParams {
    ThetaParams::new(2.0, 0.8).unwrap()
}

fn simulation(c: &mut Criterion) {
    c.bench_function("simulate_ou n=2^17", |b| {
        b.iter(|| simulate_ou(2.0, 0.8, 0.001, black_box(1 << 17), 1, 1).unwrap())
    });
}

fn whittle(c: &mut Criterion) {
    let (path, _) = simulate_ou(2.0, 0.8, 0.001, 1 << 17, 1, 1).unwrap();
    let pg = periodogram(&path).unwrap();
    let obj = WhittleObjective::new(&pg, SpectralConfig::default());
    c.bench_function("whittle contrast n=2^17", |b| {
        b.iter(|| obj.eval(black_box(theta())).unwrap())
    });
}

fn fisher(c: &mut Criterion) {
    c.bench_function("fisher_information tol=1e-8", |b| {
        b.iter(|| fisher_information(black_box(theta()), 1e-8).unwrap())
    });
}

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel");
    g.sample_size(10);
    g.bench_function("KernelFamily n=500", |b| {
        b.iter(|| KernelFamily::build(0.8, 0.02, black_box(500), false).unwrap())
    });
    g.bench_function("KernelFamily n=500 with dH", |b| {
        b.iter(|| KernelFamily::build(0.8, 0.02, black_box(500), true).unwrap())
    });
    let (path, _) = simulate_ou(2.0, 0.8, 0.01, 1000, 1, 3).unwrap();
    g.bench_function("profile likelihood sweep n=1000", |b| {
        b.iter(|| {
            ProfileLikelihood::new(&path)
                .unwrap()
                .eval(black_box(theta()))
                .unwrap()
        })
    });
    g.bench_function("solve_g m=128", |b| {
        b.iter(|| solve_g(5.0, 0.8, black_box(128), 1.0).unwrap())
    });
    g.finish();
}

fn analytic(c: &mut Criterion) {
    let f = AnalyticFactorization::new(0.8, 1e-8).unwrap();
    c.bench_function("Y_c(1+i)", |b| {
        b.iter(|| f.yc(black_box(Complex64::new(1.0, 1.0))).unwrap())
    });
}

criterion_group!(benches, simulation, whittle, fisher, kernels, analytic);
criterion_main!(benches);
