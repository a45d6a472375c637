use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use shapedrm_bench::block_sample;
use shapedrm_core::limitlaw::{cdf_grid, density, stieltjes};
use shapedrm_core::{covariance, eigenvalues, empirical_cdf, gen_catalan, levy_distance};
use std::hint::black_box;

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectrum");
    for n in [20, 60] {
        let x = block_sample(2, n, 1);
        g.bench_with_input(BenchmarkId::new("sample_r2", n), &n, |b, &n| {
            b.iter(|| block_sample(2, black_box(n), 1))
        });
        g.bench_with_input(BenchmarkId::new("eigenvalues_r2", n), &x, |b, x| {
            b.iter(|| eigenvalues(&covariance(black_box(x), n).unwrap()).unwrap())
        });
    }
    g.finish();
}

fn limit_law(c: &mut Criterion) {
    let mut g = c.benchmark_group("limit_law");
    for r in 1..=3 {
        g.bench_with_input(BenchmarkId::new("density_mid", r), &r, |b, &r| {
            b.iter(|| density(r, black_box(1.0), 1e-8).unwrap())
        });
    }
    g.bench_function("stieltjes_r3", |b| {
        b.iter(|| stieltjes(3, black_box(Complex64::new(12.0, 1.0)), 1e-12).unwrap())
    });
    g.bench_function("cdf_grid_r2_128", |b| {
        b.iter(|| cdf_grid(2, 128, 1e-8).unwrap())
    });
    g.finish();
}

fn distances(c: &mut Criterion) {
    let x = block_sample(1, 200, 3);
    let emp = empirical_cdf(&eigenvalues(&covariance(&x, 200).unwrap()).unwrap());
    let limit = cdf_grid(1, 256, 1e-10).unwrap();
    c.bench_function("levy_distance_mp_200", |b| {
        b.iter(|| levy_distance(black_box(&emp), &limit))
    });
}

fn exact(c: &mut Criterion) {
    c.bench_function("gen_catalan_r6_k200", |b| {
        b.iter(|| gen_catalan(6, black_box(200)).unwrap())
    });
}

criterion_group!(benches, spectra, limit_law, distances, exact);
criterion_main!(benches);
