use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use renewal_kit::fourier::{boundary_delta2_integral, disk_coefficient_integral, DEFAULT_PANELS};
use renewal_kit::mcsim::{simulate, SimConfig};
use renewal_kit::renewal::{check_identities, compute_renewal};
use renewal_kit::{parse_rational, IncrementDistribution, Rational};

fn two_point() -> IncrementDistribution {
    IncrementDistribution::explicit(["0", "1/3", "0", "1/6", "0", "1/2"].iter().map(|s| parse_rational(s).unwrap()).collect())
        .unwrap()
}

fn recurrence(c: &mut Criterion) {
    let mut g = c.benchmark_group("recurrence");
    let d = two_point();
    for n in [200usize, 1000] {
        g.bench_with_input(BenchmarkId::new("exact", n), &n, |b, &n| {
            b.iter(|| compute_renewal::<Rational>(black_box(&d), n).unwrap())
        });
    }
    let h = IncrementDistribution::harmonic();
    for n in [1_000usize, 10_000] {
        g.bench_with_input(BenchmarkId::new("float_harmonic", n), &n, |b, &n| {
            b.iter(|| compute_renewal::<f64>(black_box(&h), n).unwrap())
        });
    }
    g.finish();
}

fn identities(c: &mut Criterion) {
    let p = compute_renewal::<Rational>(&two_point(), 199).unwrap();
    c.bench_function("identities/prefix_200", |b| b.iter(|| check_identities(black_box(&p)).unwrap()));
}

fn quadrature(c: &mut Criterion) {
    let d = two_point();
    c.bench_function("quadrature/disk_l2_r09", |b| {
        b.iter(|| disk_coefficient_integral(black_box(&d), 2, 25, 0.9, DEFAULT_PANELS).unwrap())
    });
    let h = IncrementDistribution::harmonic();
    c.bench_function("quadrature/boundary_harmonic", |b| {
        b.iter(|| boundary_delta2_integral(black_box(&h), 10, DEFAULT_PANELS).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let cfg = SimConfig::new(two_point(), 100, 20_000, 1);
    c.bench_function("simulate/20k_trials", |b| b.iter(|| simulate(black_box(&cfg)).unwrap()));
}

criterion_group!(benches, recurrence, identities, quadrature, monte_carlo);
criterion_main!(benches);
