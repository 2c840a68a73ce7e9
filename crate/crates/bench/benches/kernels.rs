use criterion::{black_box, criterion_group, criterion_main, Criterion};
use pseudolap::analysis::pair_correlation_fraction;
use pseudolap::eisenstein::eisenstein_value;
use pseudolap::heegner::heegner_set;
use pseudolap::specialfns::{riemann_zeta, scattering_c};
use pseudolap::spectral::ThetaSampler;
use pseudolap::zeros::{constant_term_zeros, zeta_zeros};
use pseudolap::{
    Complex64, FundamentalDiscriminant, PhaseBranch, QuadratureSpec, TailMode, ThetaCombination, TruncationHeight,
    UpperHalfPoint,
};

fn special_functions(c: &mut Criterion) {
    let s = Complex64::new(0.5, 100.0);
    c.bench_function("riemann_zeta at 1/2+100i", |b| b.iter(|| riemann_zeta(black_box(s))));
    c.bench_function("scattering_c at 1/2+100i", |b| b.iter(|| scattering_c(black_box(s))));
}

fn eisenstein(c: &mut Criterion) {
    let z = UpperHalfPoint::new(0.1, 1.2).unwrap();
    let s = Complex64::new(0.5, 20.0);
    c.bench_function("eisenstein_value", |b| {
        b.iter(|| eisenstein_value(black_box(z), black_box(s)))
    });
}

fn heegner(c: &mut Criterion) {
    let d = FundamentalDiscriminant::new(-1555).unwrap();
    c.bench_function("heegner_set d=-1555", |b| b.iter(|| heegner_set(black_box(d))));
}

fn pairings(c: &mut Criterion) {
    let q = QuadratureSpec::new(100.0, 32, 0.05, TailMode::InversePowerFit).unwrap();
    let mut sampler = ThetaSampler::new(ThetaCombination::single(-7).unwrap());
    sampler.warm(&q).unwrap();
    let a = TruncationHeight::new(2.0).unwrap();
    let w = Complex64::new(0.8, 2.0);
    c.bench_function("theta_u from warm samples", |b| {
        b.iter(|| sampler.theta_u(black_box(w), &q))
    });
    c.bench_function("determinant_fg from warm samples", |b| {
        b.iter(|| sampler.determinant_fg(a, black_box(w), &q))
    });
}

fn zeros(c: &mut Criterion) {
    let branch = PhaseBranch::build(110.0).unwrap();
    let a = TruncationHeight::new(2.0).unwrap();
    let mut g = c.benchmark_group("zeros");
    g.sample_size(10);
    g.bench_function("zeta_zeros (1, 100]", |b| b.iter(|| zeta_zeros(1.0, black_box(100.0))));
    g.bench_function("constant_term_zeros (0.5, 100]", |b| {
        b.iter(|| constant_term_zeros(a, 0.5, black_box(100.0), &branch))
    });
    g.finish();
}

fn statistics(c: &mut Criterion) {
    c.bench_function("pair_correlation_fraction (0, 1/2)", |b| {
        b.iter(|| pair_correlation_fraction(0.0, black_box(0.5)))
    });
}

criterion_group!(
    benches,
    special_functions,
    eisenstein,
    heegner,
    pairings,
    zeros,
    statistics
);
criterion_main!(benches);
