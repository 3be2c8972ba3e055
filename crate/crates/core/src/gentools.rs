//! Generating functions of the step law, its tails and the renewal
//! sequence on the closed unit disk, the kernel `(1-cos x)/x²`, the second-difference generating
//! function `(1-z)²/(1-f_q(z))`, and grid checks of the inequalities the
//! Fourier argument relies on.
//!
//! Evaluation is closed-form for the geometric and harmonic families,
//! a finite sum for explicit laws, and a truncated sum with a certified
//! tail bound for custom series. `1 - f_q(z)` is always formed as
//! `Σ q_n (1 - zⁿ)` (or its closed form), never by subtracting from 1,
//! so it keeps full relative accuracy near `z = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dist::{IncrementDistribution, MAX_SERIES_TERMS};
use crate::renewal::RenewalSequence;
use crate::scalar::Scalar;

/// Default truncation target for series with infinite support.
pub const DEFAULT_TAIL_TARGET: f64 = 1e-10;

/// Below this `|x|` the kernel switches to its Taylor expansion.
pub const KERNEL_SERIES_CUTOFF: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("radius must lie in (0, 1], got {0}")]
    Radius(f64),
    #[error("angle must lie in [-π, π], got {0}")]
    Angle(f64),
    #[error("tail generating function needs a finite mean")]
    InfiniteMean,
    #[error("the point z = 1 is excluded here")]
    SingularPoint,
}

/// `z = r e^{iθ}` with `r ∈ (0, 1]`, `θ ∈ [-π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolarPoint {
    r: f64,
    theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self, GenError> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(GenError::Radius(r));
        }
        if !(-PI..=PI).contains(&theta) {
            return Err(GenError::Angle(theta));
        }
        Ok(Self { r, theta })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `(r, θ) = (1, 0)`, i.e. `z = 1`.
    pub fn is_singular(&self) -> bool {
        self.r == 1.0 && self.theta == 0.0
    }

    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }

    /// `1 - z` without cancellation near `z = 1`.
    pub fn one_minus_z(&self) -> Complex64 {
        let (r, t) = (self.r, self.theta);
        let s = (0.5 * t).sin();
        Complex64::new((1.0 - r) + 2.0 * r * s * s, -r * t.sin())
    }

    /// `|1 - z|² = (1-r)² + 4r sin²(θ/2)`.
    pub fn one_minus_z_sqr(&self) -> f64 {
        let s = (0.5 * self.theta).sin();
        (1.0 - self.r).powi(2) + 4.0 * self.r * s * s
    }
}

/// A complex value with a certified bound on its truncation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexValue {
    pub value: Complex64,
    pub error_bound: f64,
}

impl ComplexValue {
    fn exact(value: Complex64) -> Self {
        Self {
            value,
            error_bound: 0.0,
        }
    }
}

fn budget_for(d: &IncrementDistribution, budget: Option<usize>) -> usize {
    budget
        .unwrap_or_else(|| d.truncation_budget(DEFAULT_TAIL_TARGET))
        .min(MAX_SERIES_TERMS)
}

/// `1 - zⁿ` split as `(1-rⁿ) + 2rⁿ sin²(nθ/2) - i rⁿ sin(nθ)`.
fn one_minus_power(n: usize, r: f64, theta: f64) -> Complex64 {
    let nf = n as f64;
    let rn = r.powf(nf);
    let one_minus_rn = if r == 1.0 { 0.0 } else { -(nf * r.ln()).exp_m1() };
    let s = (0.5 * nf * theta).sin();
    Complex64::new(one_minus_rn + 2.0 * rn * s * s, -rn * (nf * theta).sin())
}

/// Principal log of `1 - z` for the harmonic closed forms.
fn ln_one_minus(z: &PolarPoint) -> Complex64 {
    z.one_minus_z().ln()
}

/// `f(z) = Σ_{n≤N} aₙ zⁿ` for a coefficient slice.
pub fn eval_power_series(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `f_q(z) = Σ qₙ zⁿ`.
pub fn eval_step_gf(d: &IncrementDistribution, z: &PolarPoint, budget: Option<usize>) -> ComplexValue {
    if z.is_singular() {
        // unit mass
        return ComplexValue::exact(Complex64::new(1.0, 0.0));
    }
    if let Some(a) = d.geometric_ratio() {
        let zc = z.z();
        return ComplexValue::exact((1.0 - a) * zc / (1.0 - a * zc));
    }
    if d.is_harmonic() {
        let zc = z.z();
        if zc.norm() < 0.25 {
            // f_q = Σ zⁿ/(n(n+1)); 40 terms reach 1e-26 here
            let coeffs: Vec<f64> = (0..=40).map(|n| d.weight_f64(n)).collect();
            return ComplexValue::exact(eval_power_series(&coeffs, zc));
        }
        return ComplexValue::exact(1.0 + z.one_minus_z() * ln_one_minus(z) / zc);
    }
    let n_max = match d.support_bound() {
        Some(b) => b,
        None => budget_for(d, budget),
    };
    let mut re = crate::scalar::Neumaier::default();
    let mut im = crate::scalar::Neumaier::default();
    for n in 1..=n_max {
        let w = d.weight_f64(n);
        if w == 0.0 {
            continue;
        }
        let zn = Complex64::from_polar(z.r.powf(n as f64), n as f64 * z.theta);
        re.add(w * zn.re);
        im.add(w * zn.im);
    }
    ComplexValue {
        value: Complex64::new(re.value(), im.value()),
        error_bound: if d.support_bound().is_some() { 0.0 } else { d.tail_bound(n_max) },
    }
}

/// `1 - f_q(z)`, accurate near `z = 1`.
pub fn one_minus_step_gf(d: &IncrementDistribution, z: &PolarPoint, budget: Option<usize>) -> ComplexValue {
    if z.is_singular() {
        return ComplexValue::exact(Complex64::new(0.0, 0.0));
    }
    if let Some(a) = d.geometric_ratio() {
        return ComplexValue::exact(z.one_minus_z() / (1.0 - a * z.z()));
    }
    if d.is_harmonic() {
        let zc = z.z();
        if zc.norm() < 0.25 {
            return ComplexValue::exact(1.0 - eval_step_gf(d, z, budget).value);
        }
        return ComplexValue::exact(-(z.one_minus_z() * ln_one_minus(z)) / zc);
    }
    let n_max = match d.support_bound() {
        Some(b) => b,
        None => budget_for(d, budget),
    };
    let mut re = crate::scalar::Neumaier::default();
    let mut im = crate::scalar::Neumaier::default();
    for n in 1..=n_max {
        let w = d.weight_f64(n);
        if w == 0.0 {
            continue;
        }
        let v = one_minus_power(n, z.r, z.theta);
        re.add(w * v.re);
        im.add(w * v.im);
    }
    ComplexValue {
        value: Complex64::new(re.value(), im.value()),
        // |1 - zⁿ| ≤ 2 on the closed disk
        error_bound: if d.support_bound().is_some() { 0.0 } else { 2.0 * d.tail_bound(n_max) },
    }
}

/// `f_Q(z) = Σ Qₙ zⁿ`, defined on the closed disk when the mean is finite.
pub fn eval_tail_gf(
    d: &IncrementDistribution,
    z: &PolarPoint,
    budget: Option<usize>,
) -> Result<ComplexValue, GenError> {
    if !d.has_finite_mean() {
        return Err(GenError::InfiniteMean);
    }
    let zc = z.z();
    if let Some(a) = d.geometric_ratio() {
        return Ok(ComplexValue::exact(1.0 / (1.0 - a * zc)));
    }
    let (n_max, error_bound) = match d.support_bound() {
        Some(b) => (b - 1, 0.0),
        None => {
            let n = budget_for(d, budget);
            let rest = d.tail_remainder::<f64>(n).ok().flatten().unwrap_or(f64::INFINITY);
            (n, rest)
        }
    };
    let coeffs: Vec<f64> = (0..=n_max).map(|n| d.tail_f64(n)).collect();
    Ok(ComplexValue {
        value: eval_power_series(&coeffs, zc),
        error_bound,
    })
}

/// `f_p(z) = Σ pₙ zⁿ` truncated to the computed prefix. Since
/// `0 ≤ pₙ ≤ 1`, the dropped tail is at most `r^{N+1}/(1-r)`; on the unit
/// circle no finite bound exists and the error bound is `+∞`.
pub fn eval_renewal_gf<S: Scalar>(p: &RenewalSequence<S>, z: &PolarPoint) -> ComplexValue {
    let coeffs: Vec<f64> = p.terms().terms().iter().map(Scalar::to_f64).collect();
    let n = p.last_index() as f64;
    ComplexValue {
        value: eval_power_series(&coeffs, z.z()),
        error_bound: if z.r < 1.0 {
            z.r.powf(n + 1.0) / (1.0 - z.r) + p.error_bound() * (n + 1.0)
        } else {
            f64::INFINITY
        },
    }
}

/// `G(x) = (1 - cos x)/x²`, with `G(0) = 1/2`.
pub fn versine_ratio(x: f64) -> f64 {
    if x.abs() < KERNEL_SERIES_CUTOFF {
        let x2 = x * x;
        0.5 - x2 / 24.0 + x2 * x2 / 720.0
    } else {
        // 1 - cos x = 2 sin²(x/2) avoids cancellation for moderate x
        let s = (0.5 * x).sin();
        2.0 * s * s / (x * x)
    }
}

/// `(1-z)²/(1-f_q(z))`, the generating function of `Δ²[p]`, extended by
/// 0 at `z = 1`.
pub fn eval_delta2_gf(d: &IncrementDistribution, z: &PolarPoint, budget: Option<usize>) -> ComplexValue {
    if z.is_singular() {
        return ComplexValue::exact(Complex64::new(0.0, 0.0));
    }
    if let Some(a) = d.geometric_ratio() {
        return ComplexValue::exact(z.one_minus_z() * (1.0 - a * z.z()));
    }
    if d.is_harmonic() && z.z().norm() >= 0.25 {
        // (1-z)²/(1-f_q) = -z(1-z)/Log(1-z)
        return ComplexValue::exact(-(z.z() * z.one_minus_z()) / ln_one_minus(z));
    }
    let w = z.one_minus_z();
    let den = one_minus_step_gf(d, z, budget);
    let value = w * w / den.value;
    // first-order propagation of the denominator's truncation error
    let err = if den.error_bound == 0.0 {
        0.0
    } else {
        let slack = (den.value.norm() - den.error_bound).max(f64::MIN_POSITIVE);
        z.one_minus_z_sqr() * den.error_bound / (den.value.norm() * slack)
    };
    ComplexValue {
        value,
        error_bound: err,
    }
}

/// The default check grid: `r ∈ {0.5, 0.9, 0.99, 1}` against 512
/// equispaced angles `θ_j = -π + 2πj/512`, minus `(1, 0)`.
pub fn default_grid() -> Vec<PolarPoint> {
    let mut grid = Vec::with_capacity(4 * 512);
    for &r in &[0.5, 0.9, 0.99, 1.0] {
        for j in 0..512 {
            let theta = -PI + 2.0 * PI * j as f64 / 512.0;
            let p = PolarPoint::new(r, theta).expect("grid point in range");
            if !p.is_singular() {
                grid.push(p);
            }
        }
    }
    grid
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosBoundReport {
    pub points: usize,
    pub failures: Vec<PolarPoint>,
    /// Smallest `1 - Σ qₙ rⁿ cos nθ - error_bound` seen on the grid.
    pub min_margin: f64,
}

impl CosBoundReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Asserts `Σ qₙ rⁿ cos nθ < 1 - error_bound` at every grid point.
pub fn check_cos_sum_below_one(
    d: &IncrementDistribution,
    grid: &[PolarPoint],
    budget: Option<usize>,
) -> Result<CosBoundReport, GenError> {
    if grid.iter().any(PolarPoint::is_singular) {
        return Err(GenError::SingularPoint);
    }
    let margins: Vec<(PolarPoint, f64)> = grid
        .par_iter()
        .map(|p| {
            let v = one_minus_step_gf(d, p, budget);
            (*p, v.value.re - v.error_bound)
        })
        .collect();
    Ok(CosBoundReport {
        points: grid.len(),
        failures: margins.iter().filter(|(_, m)| m.is_nan() || *m <= 0.0).map(|(p, _)| *p).collect(),
        min_margin: margins.iter().map(|(_, m)| *m).fold(f64::INFINITY, f64::min),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModulusBoundPoint {
    pub point: PolarPoint,
    /// `|(1-z)²/(1-f_q(z))|`
    pub lhs: f64,
    /// `(1 + r² - 2r cos θ)/(1 - Σ qₙ rⁿ cos nθ)`
    pub rhs: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusBoundReport {
    pub points: Vec<ModulusBoundPoint>,
}

impl ModulusBoundReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.passed)
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !p.passed).count()
    }

    /// Largest `|lhs - rhs|` over the real-axis points with `r < 1`, where
    /// the bound must hold with equality.
    pub fn real_axis_gap(&self) -> Option<f64> {
        self.points
            .iter()
            .filter(|p| p.point.theta() == 0.0 && p.point.r() < 1.0)
            .map(|p| (p.lhs - p.rhs).abs())
            .reduce(f64::max)
    }
}

/// Relative slack allowed for rounding in the modulus bound.
pub const MODULUS_BOUND_RTOL: f64 = 1e-12;

/// Checks `|(1-z)²/(1-f_q(z))| ≤ (1 + r² - 2r cos θ)/(1 - Σ qₙ rⁿ cos nθ)`
/// at every grid point.
pub fn check_delta2_modulus_bound(
    d: &IncrementDistribution,
    grid: &[PolarPoint],
    budget: Option<usize>,
) -> Result<ModulusBoundReport, GenError> {
    if grid.iter().any(PolarPoint::is_singular) {
        return Err(GenError::SingularPoint);
    }
    let points = grid
        .par_iter()
        .map(|p| {
            let den = one_minus_step_gf(d, p, budget);
            let num = p.one_minus_z_sqr();
            let lhs = num / den.value.norm();
            let rhs = num / den.value.re;
            // truncation error enters both denominators
            let tol = MODULUS_BOUND_RTOL * rhs.abs()
                + if den.error_bound > 0.0 {
                    2.0 * num * den.error_bound / (den.value.re - den.error_bound).max(f64::MIN_POSITIVE).powi(2)
                } else {
                    0.0
                };
            ModulusBoundPoint {
                point: *p,
                lhs,
                rhs,
                passed: den.value.re > 0.0 && lhs <= rhs + tol,
            }
        })
        .collect();
    Ok(ModulusBoundReport { points })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub point: PolarPoint,
    /// `1 + r² - 2r cos θ`
    pub chord_direct: f64,
    /// `(1-r)² + 4r sin²(θ/2)`
    pub chord_split: f64,
    pub chord_ok: bool,
    /// `1 - Σ qₙ rⁿ cos nθ`
    pub gap_direct: f64,
    /// `(1-r) Σ qₙ(1 + r + … + r^{n-1}) + θ² Σ n² qₙ rⁿ G(nθ)`
    pub gap_split: f64,
    pub gap_tolerance: f64,
    pub gap_ok: bool,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.chord_ok && self.gap_ok
    }
}

/// Rounding allowance for the two-term split of `1 - Re f_q`.
pub const DECOMPOSITION_ROUNDING: f64 = 1e-13;

/// Checks the chord identity `1 + r² - 2r cos θ = (1-r)² + 4r sin²(θ/2)`
/// and the two-term split of `1 - Σ qₙ rⁿ cos nθ` into a radial and an
/// angular part.
pub fn check_decomposition(d: &IncrementDistribution, point: &PolarPoint, budget: Option<usize>) -> DecompositionReport {
    let (r, t) = (point.r, point.theta);
    let chord_direct = 1.0 + r * r - 2.0 * r * t.cos();
    let s = (0.5 * t).sin();
    let chord_split = (1.0 - r).powi(2) + 4.0 * r * s * s;
    let chord_ok = (chord_direct - chord_split).abs() <= 8.0 * f64::EPSILON * (1.0 + r * r);

    let fq = eval_step_gf(d, point, budget);
    let gap_direct = 1.0 - fq.value.re;

    let n_max = match d.support_bound() {
        Some(b) => b,
        None => budget_for(d, budget),
    };
    let mut radial = crate::scalar::Neumaier::default();
    let mut angular = crate::scalar::Neumaier::default();
    for n in 1..=n_max {
        let w = d.weight_f64(n);
        if w == 0.0 {
            continue;
        }
        let nf = n as f64;
        // 1 + r + … + r^{n-1}
        let geometric_sum = if r == 1.0 { nf } else { -(nf * r.ln()).exp_m1() / (1.0 - r) };
        radial.add(w * geometric_sum);
        angular.add(nf * nf * w * r.powf(nf) * versine_ratio(nf * t));
    }
    let gap_split = (1.0 - r) * radial.value() + t * t * angular.value();
    // the split drops Σ_{n>N} qₙ (1 - rⁿ cos nθ) ≤ 2Q_N; f_q itself may carry Q_N
    let truncation = if d.support_bound().is_some() {
        0.0
    } else {
        2.0 * d.tail_bound(n_max) + fq.error_bound
    };
    let gap_tolerance = truncation + DECOMPOSITION_ROUNDING;
    DecompositionReport {
        point: *point,
        chord_direct,
        chord_split,
        chord_ok,
        gap_direct,
        gap_split,
        gap_tolerance,
        gap_ok: (gap_direct - gap_split).abs() <= gap_tolerance,
    }
}

/// Result of the shrinking-neighbourhood search around `z = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NeighbourhoodBound {
    /// Radius in `(1-r) + |θ|` inside which `|H| ≤ eps` on every sample.
    pub delta: f64,
    pub eps: f64,
    /// Largest `|H|` sampled inside the neighbourhood.
    pub max_modulus: f64,
    pub samples: usize,
}

/// Halves `δ` from `start` until `|(1-z)²/(1-f_q(z))| ≤ eps` on a dense
/// sample of `{(1-r) + |θ| ≤ δ}`; returns `None` if no `δ ≥ min_delta`
/// works.
pub fn find_delta2_neighbourhood(
    d: &IncrementDistribution,
    eps: f64,
    start: f64,
    min_delta: f64,
    budget: Option<usize>,
) -> Option<NeighbourhoodBound> {
    let mut delta = start;
    while delta >= min_delta {
        let (max_modulus, samples) = sample_neighbourhood(d, delta, budget);
        if max_modulus <= eps {
            return Some(NeighbourhoodBound {
                delta,
                eps,
                max_modulus,
                samples,
            });
        }
        delta *= 0.5;
    }
    None
}

/// Max `|H|` over a polar sample of the diamond `(1-r) + |θ| ≤ δ`.
pub fn sample_neighbourhood(d: &IncrementDistribution, delta: f64, budget: Option<usize>) -> (f64, usize) {
    const SCALES: usize = 48;
    const SPLITS: usize = 33;
    let mut points = Vec::with_capacity(SCALES * SPLITS * 2);
    for k in 0..SCALES {
        // log-spaced radii reach deep into the neighbourhood
        let scale = delta * 2f64.powf(-(k as f64) * 40.0 / SCALES as f64);
        for j in 0..SPLITS {
            let u = j as f64 / (SPLITS - 1) as f64;
            let radial = scale * u;
            let angular = scale * (1.0 - u);
            for sign in [-1.0, 1.0] {
                if let Ok(p) = PolarPoint::new(1.0 - radial, sign * angular) {
                    points.push(p);
                }
            }
        }
    }
    let max = points
        .par_iter()
        .map(|p| eval_delta2_gf(d, p, budget))
        .map(|v| v.value.norm() + v.error_bound)
        .reduce(|| 0.0, f64::max);
    (max, points.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;

    fn explicit(ws: &[&str]) -> IncrementDistribution {
        IncrementDistribution::explicit(ws.iter().map(|s| parse_rational(s).unwrap()).collect()).unwrap()
    }

    fn pt(r: f64, t: f64) -> PolarPoint {
        PolarPoint::new(r, t).unwrap()
    }

    #[test]
    fn polar_point_validation() {
        assert!(PolarPoint::new(0.0, 0.0).is_err());
        assert!(PolarPoint::new(1.01, 0.0).is_err());
        assert!(PolarPoint::new(0.5, 4.0).is_err());
        assert!(pt(1.0, 0.0).is_singular());
        assert!(!pt(1.0, PI).is_singular());
    }

    #[test]
    fn step_gf_values() {
        let d = explicit(&["0", "1/2", "1/2"]);
        assert_eq!(eval_step_gf(&d, &pt(1.0, 0.0), None).value, Complex64::new(1.0, 0.0));
        let v = eval_step_gf(&d, &pt(1.0, PI), None);
        assert!(v.value.norm() < 1e-15);
        assert_eq!(v.error_bound, 0.0);
        for d in [IncrementDistribution::harmonic(), IncrementDistribution::geometric(parse_rational("1/3").unwrap()).unwrap()] {
            let one = eval_step_gf(&d, &pt(1.0, 0.0), None).value;
            assert_eq!(one, Complex64::new(1.0, 0.0));
            // |1 - f_q| ≤ |1-z|·(1 + ln(1/|1-z|)) on the circle
            let one = eval_step_gf(&d, &pt(1.0, 1e-12), None).value;
            assert!((one - 1.0).norm() < 1e-12 * (1.0 + 1e12f64.ln()), "{one}");
            assert!(eval_step_gf(&d, &pt(1e-9, 0.3), None).value.norm() < 1e-9);
        }
    }

    #[test]
    fn harmonic_closed_form_matches_series() {
        let d = IncrementDistribution::harmonic();
        for &(r, t) in &[(0.5, 0.3), (0.9, -2.0), (0.3, 1.0), (0.2, 0.1)] {
            let z = pt(r, t);
            let coeffs: Vec<f64> = (0..4000).map(|n| d.weight_f64(n)).collect();
            let series = eval_power_series(&coeffs, z.z());
            assert!((eval_step_gf(&d, &z, None).value - series).norm() < 1e-13);
            assert!((one_minus_step_gf(&d, &z, None).value - (1.0 - series)).norm() < 1e-13);
        }
    }

    #[test]
    fn tail_gf_values() {
        let d = explicit(&["0", "1/2", "1/2"]);
        let v = eval_tail_gf(&d, &pt(1.0, 0.0), None).unwrap();
        assert!((v.value - 1.5).norm() < 1e-15);
        let g = IncrementDistribution::geometric(parse_rational("1/2").unwrap()).unwrap();
        let v = eval_tail_gf(&g, &pt(0.7, 0.0), None).unwrap();
        assert!((v.value.re - 1.0 / (1.0 - 0.35)).abs() < 1e-15);
        let v = eval_tail_gf(&d, &pt(1e-12, 0.0), None).unwrap();
        assert!((v.value.re - 1.0).abs() < 1e-11);
        assert_eq!(
            eval_tail_gf(&IncrementDistribution::harmonic(), &pt(0.5, 0.0), None),
            Err(GenError::InfiniteMean)
        );
    }

    #[test]
    fn kernel_values() {
        assert_eq!(versine_ratio(0.0), 0.5);
        assert!((versine_ratio(PI) - 2.0 / (PI * PI)).abs() < 1e-16);
        for &x in &[1e-5, 9.99e-5, 1e-4, 1.01e-4, 0.3] {
            assert!((x * x * versine_ratio(x) - (1.0 - x.cos())).abs() < 1e-16);
            assert_eq!(versine_ratio(x), versine_ratio(-x));
        }
    }

    #[test]
    fn cos_bound_examples() {
        let d = explicit(&["0", "1/2", "1/2"]);
        let rep = check_cos_sum_below_one(&d, &[pt(1.0, PI), pt(0.5, 0.0)], None).unwrap();
        assert!(rep.passed());
        let unit = explicit(&["0", "1"]);
        let rep = check_cos_sum_below_one(&unit, &[pt(1.0, PI / 2.0)], None).unwrap();
        assert!(rep.passed());
        assert!((rep.min_margin - 1.0).abs() < 1e-15);
        assert!(check_cos_sum_below_one(&unit, &[pt(1.0, 0.0)], None).is_err());
    }

    #[test]
    fn modulus_bound_examples() {
        let d = explicit(&["0", "1/2", "1/2"]);
        let rep = check_delta2_modulus_bound(&d, &[pt(1.0, PI)], None).unwrap();
        let p = rep.points[0];
        assert!((p.lhs - 4.0).abs() < 1e-14 && (p.rhs - 4.0).abs() < 1e-14 && p.passed);

        let unit = explicit(&["0", "1"]);
        let rep = check_delta2_modulus_bound(&unit, &[pt(0.5, 0.0)], None).unwrap();
        assert!((rep.points[0].lhs - 0.5).abs() < 1e-15);
        assert!(rep.real_axis_gap().unwrap() < 1e-15);
    }

    #[test]
    fn delta2_gf_values() {
        let d = explicit(&["0", "1/2", "1/2"]);
        assert_eq!(eval_delta2_gf(&d, &pt(1.0, 0.0), None).value, Complex64::new(0.0, 0.0));
        assert!((eval_delta2_gf(&d, &pt(1.0, PI), None).value - 4.0).norm() < 1e-14);
        let h = IncrementDistribution::harmonic();
        let z = pt(1.0, 1e-3);
        let v = eval_delta2_gf(&h, &z, None).value.norm();
        let rep = check_delta2_modulus_bound(&h, &[z], None).unwrap();
        assert!(v <= rep.points[0].rhs * (1.0 + 1e-12));
        // harmonic closed form against the generic ratio
        let z = pt(0.8, 0.7);
        let generic = z.one_minus_z() * z.one_minus_z() / one_minus_step_gf(&h, &z, None).value;
        assert!((eval_delta2_gf(&h, &z, None).value - generic).norm() < 1e-14);
    }

    #[test]
    fn decomposition_examples() {
        let d = explicit(&["0", "1/3", "1/6", "1/2"]);
        let rep = check_decomposition(&d, &pt(1.0, PI), None);
        assert!((rep.chord_direct - 4.0).abs() < 1e-15 && rep.passed());
        let rep = check_decomposition(&d, &pt(0.5, 0.0), None);
        assert!((rep.chord_direct - 0.25).abs() < 1e-15 && rep.passed());
        let unit = explicit(&["0", "1"]);
        for &x in &[0.1, 1.0, -2.5] {
            let rep = check_decomposition(&unit, &pt(1.0, x), None);
            assert!((rep.gap_direct - x * x * versine_ratio(x)).abs() < 1e-15);
            assert!(rep.passed());
        }
        let h = IncrementDistribution::harmonic();
        let rep = check_decomposition(&h, &pt(0.9, 0.4), Some(1 << 16));
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn neighbourhood_search_on_harmonic() {
        let h = IncrementDistribution::harmonic();
        let nb = find_delta2_neighbourhood(&h, 1e-2, 1.0, 1e-6, None).unwrap();
        assert!(nb.max_modulus <= 1e-2);
        assert!(nb.delta > 1e-3);
    }
}
