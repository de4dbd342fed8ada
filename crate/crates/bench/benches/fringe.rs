use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use trifringe_core::validation::{equivalence_sweep, EquivalenceGrid};
use trifringe_core::*;

fn fringes(c: &mut Criterion) {
    let src = SourceParams::from_ratio(1.03, 0.06, Expansion::LowOrder).unwrap();
    let settings = MziSettings::default();
    c.bench_function("oracle_scan_720", |b| {
        b.iter(|| OracleFringe::new(black_box(&src), &settings).unwrap().scan(720).unwrap())
    });
    let coeffs = analytic_coefficients(&src, ModelForm::Corrected);
    c.bench_function("analytic_scan_720", |b| {
        b.iter(|| FringeScan::sample(720, ScanKind::ModelRate, |p| three_photon_rate_analytic(black_box(&coeffs), p)))
    });
    let grid = EquivalenceGrid::default();
    c.bench_function("equivalence_sweep_default", |b| b.iter(|| equivalence_sweep(black_box(&grid)).unwrap()));
}

fn fitting(c: &mut Criterion) {
    let src = SourceParams::from_ratio(0.89, 0.06, Expansion::LowOrder).unwrap();
    let settings = MziSettings::default();
    let phases = phase_grid(90);
    let peak = OracleFringe::new(&src, &settings).unwrap().scan(720).unwrap().max_value();
    let scan = synthetic_scan(&src, &settings, &phases, 1e4 / peak, 1).unwrap();
    c.bench_function("fit_poisson_scan_90", |b| {
        b.iter(|| fit_fringe(black_box(&scan), ModelForm::Corrected, None).unwrap())
    });
    let ratios = log_space(0.01, 100.0, 41);
    c.bench_function("ratio_sweep_41x72", |b| {
        b.iter(|| ratio_sweep(0.1, black_box(&ratios), 72, RateModel::Oracle).unwrap())
    });
}

criterion_group!(benches, fringes, fitting);
criterion_main!(benches);
