use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use taukit::matmodels::{bimoments, hciz_check, moments, z_n_ext_series};
use taukit::symfunc::{schur_char, schur_jt};
use taukit::tau::{tau_hypergeom_det, tau_hypergeom_series};
use taukit::{MeasureSpec, RhoSequence};
use taukit_bench::{eigs, flows, staircase};

fn schur(c: &mut Criterion) {
    let lambda = staircase(5);
    let t = flows(15);
    let a = eigs(&[0.9, 0.4, -0.2, -0.7, 0.1]);
    c.bench_function("schur_jt_staircase5", |b| b.iter(|| schur_jt(black_box(&lambda), black_box(&t))));
    c.bench_function("schur_char_staircase5", |b| b.iter(|| schur_char(black_box(&lambda), black_box(&a))));
}

fn hypergeom(c: &mut Criterion) {
    let rho = RhoSequence::exp();
    let a = eigs(&[0.8, 0.3, -0.4]);
    let b = eigs(&[0.5, -0.1, 0.2]);
    c.bench_function("tau_hypergeom_series_n3_cutoff16", |bn| {
        bn.iter(|| tau_hypergeom_series(&rho, 3, black_box(&a), black_box(&b), 16))
    });
    c.bench_function("tau_hypergeom_det_n3", |bn| bn.iter(|| tau_hypergeom_det(&rho, black_box(&a), black_box(&b))));
}

fn matrix_models(c: &mut Criterion) {
    let g = MeasureSpec::gauss(1.0).unwrap();
    let rho = RhoSequence::exp();
    let a = eigs(&[0.4, 0.1]);
    let mm = moments(&g, 24).unwrap();
    c.bench_function("moments_gauss_24", |b| b.iter(|| moments(black_box(&g), 24)));
    c.bench_function("z_n_ext_series_n2_cutoff18", |b| b.iter(|| z_n_ext_series(&rho, &mm, black_box(&a), 18)));
    c.bench_function("bimoments_gauss_16", |b| b.iter(|| bimoments(black_box(&g), &g, 16)));
    let x = eigs(&[0.7, -0.3]);
    let a2 = eigs(&[1.0, 0.2]);
    c.bench_function("hciz_mc_n2_10k", |b| b.iter(|| hciz_check(black_box(&a2), &x, 10_000, 42)));
}

criterion_group!(benches, schur, hypergeom, matrix_models);
criterion_main!(benches);
