//! Fourier-coefficient representations of `Δ^l[p]`, evaluated by the
//! composite trapezoid rule on a uniform θ grid.
//!
//! For `0 < r < 1`,
//! `2π Δ^l[p]_m r^m = ∫_{-π}^{π} (1 - re^{iθ})^l / (1 - f_q(re^{iθ})) e^{-imθ} dθ`,
//! and on the unit circle the same coefficients come from `1/f_Q` (finite
//! mean, `l = 1`) or from `(1-z)²/(1-f_q)` extended by 0 at `z = 1`
//! (infinite mean, `l = 2`).
//!
//! Sums are accumulated in double-double arithmetic and the nodes use
//! double-double roots of unity, so dividing a result by a tiny `r^m`
//! does not amplify rounding. Laws with rational coefficients (explicit,
//! geometric) are evaluated entirely in double-double; the others are
//! evaluated in `f64` and lifted.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::dd::{roots_of_unity, Dd, DdComplex, DD_PI};
use crate::dist::IncrementDistribution;
use crate::gentools::{eval_delta2_gf, eval_tail_gf, one_minus_step_gf, PolarPoint};
use crate::renewal::{compute_renewal, RenewalError};

/// Panel count used when callers have no reason to pick another.
pub const DEFAULT_PANELS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("panel count must be even and at least 4, got {0}")]
    Panels(usize),
    #[error("radius must lie strictly inside (0, 1), got {0}")]
    Radius(f64),
    #[error("the boundary representation through 1/f_Q needs a finite mean")]
    InfiniteMean,
    #[error("finite mean: use the first-difference boundary integral instead")]
    FiniteMean,
    #[error(transparent)]
    Renewal(#[from] RenewalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegrandId {
    /// `(1 - re^{iθ})^l / (1 - f_q(re^{iθ}))`
    DiskCoefficient { order: u32, r: f64 },
    /// `1 / f_Q(e^{iθ})`
    BoundaryDelta1,
    /// `(1 - e^{iθ})² / (1 - f_q(e^{iθ}))`, 0 at `θ = 0`
    BoundaryDelta2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub panels: usize,
    /// `|T(P) - T(P/2)|`: a convergence estimate, not a bound.
    pub est_error: f64,
    pub integrand: IntegrandId,
    pub m: usize,
}

impl QuadratureResult {
    /// `value / 2π`, the coefficient the integral represents (still
    /// scaled by `r^m` for disk integrals).
    pub fn coefficient(&self) -> Complex64 {
        self.value / (2.0 * PI)
    }
}

fn check_panels(panels: usize) -> Result<(), FourierError> {
    if panels < 4 || !panels.is_multiple_of(2) {
        return Err(FourierError::Panels(panels));
    }
    Ok(())
}

/// Nodes `θ_j = -π + 2πj/P`, so `e^{iθ_j} = -ω^j`.
struct Grid {
    panels: usize,
    roots: Vec<DdComplex>,
}

impl Grid {
    fn new(panels: usize) -> Self {
        Self {
            panels,
            roots: roots_of_unity(panels),
        }
    }

    fn theta(&self, j: usize) -> f64 {
        -PI + 2.0 * PI * j as f64 / self.panels as f64
    }

    /// `e^{ikθ_j} = (-1)^k ω^{jk}` for any integer `k`.
    fn phase(&self, j: usize, k: i64) -> DdComplex {
        let p = self.panels as i64;
        let idx = ((j as i64 % p) * (k % p)).rem_euclid(p) as usize;
        let w = self.roots[idx];
        if k.rem_euclid(2) == 1 {
            -w
        } else {
            w
        }
    }

    fn polar(&self, r: f64, j: usize) -> PolarPoint {
        // rounding can push the first node a hair below -π
        let theta = self.theta(j).clamp(-PI, PI);
        PolarPoint::new(r, theta).expect("node on the disk")
    }

    /// `(2π/P) Σ_j F_j e^{-imθ_j}` and the same rule on every other node.
    fn integrate(&self, m: usize, f: impl Fn(usize) -> DdComplex) -> (Complex64, f64) {
        let mut full = DdComplex::ZERO;
        let mut even = DdComplex::ZERO;
        for j in 0..self.panels {
            let term = f(j) * self.phase(j, -(m as i64));
            full = full + term;
            if j % 2 == 0 {
                even = even + term;
            }
        }
        let h = (DD_PI * Dd::from_f64(2.0)) / Dd::from_f64(self.panels as f64);
        let full = full.scale(h);
        let half = even.scale(h * Dd::from_f64(2.0));
        (full.to_c64(), (full - half).to_c64().norm())
    }
}

/// Exact-coefficient evaluator for laws with rational weights.
enum RationalLaw {
    /// `q_n`, `n = 0..=N`, and `Q_n`, `n = 0..N`
    Polynomial { weights: Vec<Dd>, tails: Vec<Dd> },
    /// `Q_n = aⁿ`
    Geometric { a: Dd },
}

impl RationalLaw {
    fn of(d: &IncrementDistribution) -> Option<Self> {
        if let Some(ws) = d.explicit_weights() {
            let tails = d.explicit_tails().expect("explicit law");
            return Some(RationalLaw::Polynomial {
                weights: ws.iter().map(Dd::from_ratio).collect(),
                tails: tails.iter().map(Dd::from_ratio).collect(),
            });
        }
        if d.geometric_ratio().is_some() {
            let a = d.tail_exact(1).expect("geometric tail");
            return Some(RationalLaw::Geometric { a: Dd::from_ratio(&a) });
        }
        None
    }
}

/// `z_j = r e^{iθ_j}` in double-double.
fn node(grid: &Grid, r: Dd, j: usize) -> DdComplex {
    grid.phase(j, 1).scale(r)
}

fn powers(r: Dd, n: usize) -> Vec<Dd> {
    let mut out = Vec::with_capacity(n + 1);
    let mut x = Dd::ONE;
    for _ in 0..=n {
        out.push(x);
        x = x * r;
    }
    out
}

/// `Σ c_k r^k e^{ikθ_j}` for a coefficient list.
fn poly_at(grid: &Grid, coeffs: &[Dd], rpow: &[Dd], j: usize) -> DdComplex {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.to_f64() != 0.0)
        .fold(DdComplex::ZERO, |acc, (k, c)| {
            acc + grid.phase(j, k as i64).scale(*c * rpow[k])
        })
}

/// `∫_{-π}^{π} (1 - re^{iθ})^l / (1 - f_q(re^{iθ})) e^{-imθ} dθ`, which
/// equals `2π Δ^l[p]_m r^m` for `0 < r < 1`.
pub fn disk_coefficient_integral(
    d: &IncrementDistribution,
    order: u32,
    m: usize,
    r: f64,
    panels: usize,
) -> Result<QuadratureResult, FourierError> {
    check_panels(panels)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(FourierError::Radius(r));
    }
    let grid = Grid::new(panels);
    let rd = Dd::from_f64(r);
    let (value, est_error) = match RationalLaw::of(d) {
        Some(law) => {
            let g = &grid;
            let one_minus_fq: Box<dyn Fn(usize) -> DdComplex + '_> = match law {
                RationalLaw::Polynomial { weights, .. } => {
                    let rpow = powers(rd, weights.len());
                    Box::new(move |j| DdComplex::ONE - poly_at(g, &weights, &rpow, j))
                }
                RationalLaw::Geometric { a } => Box::new(move |j| {
                    // 1 - f_q = (1-z)/(1-az)
                    let z = node(g, rd, j);
                    (DdComplex::ONE - z) / (DdComplex::ONE - z.scale(a))
                }),
            };
            grid.integrate(m, |j| {
                let one_minus_z = DdComplex::ONE - node(&grid, rd, j);
                let mut num = DdComplex::ONE;
                for _ in 0..order {
                    num = num * one_minus_z;
                }
                num / one_minus_fq(j)
            })
        }
        None => grid.integrate(m, |j| {
            let p = grid.polar(r, j);
            let mut num = Complex64::one();
            for _ in 0..order {
                num *= p.one_minus_z();
            }
            DdComplex::from_c64(num / one_minus_step_gf(d, &p, None).value)
        }),
    };
    Ok(QuadratureResult {
        value,
        panels,
        est_error,
        integrand: IntegrandId::DiskCoefficient { order, r },
        m,
    })
}

/// `∫_{-π}^{π} e^{-imθ} / f_Q(e^{iθ}) dθ = 2π Δ[p]_m` for finite mean.
pub fn boundary_delta1_integral(
    d: &IncrementDistribution,
    m: usize,
    panels: usize,
) -> Result<QuadratureResult, FourierError> {
    check_panels(panels)?;
    if !d.has_finite_mean() {
        return Err(FourierError::InfiniteMean);
    }
    let grid = Grid::new(panels);
    let (value, est_error) = match RationalLaw::of(d) {
        Some(RationalLaw::Polynomial { tails, .. }) => {
            let ones = vec![Dd::ONE; tails.len() + 1];
            grid.integrate(m, |j| DdComplex::ONE / poly_at(&grid, &tails, &ones, j))
        }
        Some(RationalLaw::Geometric { a }) => grid.integrate(m, |j| DdComplex::ONE - grid.phase(j, 1).scale(a)),
        None => grid.integrate(m, |j| {
            let p = grid.polar(1.0, j);
            let f = eval_tail_gf(d, &p, None).expect("finite mean").value;
            DdComplex::from_c64(1.0 / f)
        }),
    };
    Ok(QuadratureResult {
        value,
        panels,
        est_error,
        integrand: IntegrandId::BoundaryDelta1,
        m,
    })
}

/// `∫_{-π}^{π} H(1, θ) e^{-imθ} dθ = 2π Δ²[p]_m` for infinite mean, where
/// `H(1, θ) = (1-e^{iθ})²/(1-f_q(e^{iθ}))` and `H(1, 0) = 0`.
pub fn boundary_delta2_integral(
    d: &IncrementDistribution,
    m: usize,
    panels: usize,
) -> Result<QuadratureResult, FourierError> {
    check_panels(panels)?;
    if d.has_finite_mean() {
        return Err(FourierError::FiniteMean);
    }
    let grid = Grid::new(panels);
    let (value, est_error) = grid.integrate(m, |j| {
        // j = P/2 is θ = 0, where eval_delta2_gf returns exactly 0
        let p = if 2 * j == panels {
            PolarPoint::new(1.0, 0.0).expect("z = 1")
        } else {
            grid.polar(1.0, j)
        };
        DdComplex::from_c64(eval_delta2_gf(d, &p, None).value)
    });
    Ok(QuadratureResult {
        value,
        panels,
        est_error,
        integrand: IntegrandId::BoundaryDelta2,
        m,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub m: usize,
    /// `|Δ^k[p]_m|` from the recurrence.
    pub recurrence: f64,
    /// `|value/2π|` from the boundary integral, when it applies.
    pub integral: Option<f64>,
    pub est_error: Option<f64>,
}

/// `|Δ^k[p]_m|` at the requested `m`, from the recurrence and, where the
/// boundary representation applies (`k = 1` with finite mean, `k = 2`
/// with infinite mean), from quadrature with enough panels to resolve `m`.
pub fn decay_probe(
    d: &IncrementDistribution,
    order: usize,
    m_values: &[usize],
    min_panels: usize,
) -> Result<Vec<DecayRow>, FourierError> {
    let top = m_values.iter().copied().max().unwrap_or(0);
    let p = compute_renewal::<f64>(d, top)?;
    let diffs = p.differences(order);
    m_values
        .iter()
        .map(|&m| {
            let panels = min_panels.max((8 * (m + 1)).next_power_of_two());
            let quad = match (order, d.has_finite_mean()) {
                (1, true) => Some(boundary_delta1_integral(d, m, panels)?),
                (2, false) => Some(boundary_delta2_integral(d, m, panels)?),
                _ => None,
            };
            Ok(DecayRow {
                m,
                recurrence: diffs.terms()[m].abs(),
                integral: quad.map(|q| q.coefficient().norm()),
                est_error: quad.map(|q| q.est_error / (2.0 * PI)),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;

    fn explicit(ws: &[&str]) -> IncrementDistribution {
        IncrementDistribution::explicit(ws.iter().map(|s| parse_rational(s).unwrap()).collect()).unwrap()
    }

    fn geometric_half() -> IncrementDistribution {
        IncrementDistribution::geometric(parse_rational("1/2").unwrap()).unwrap()
    }

    #[test]
    fn zeroth_coefficient_is_two_pi() {
        for d in [explicit(&["0", "1/4", "3/4"]), geometric_half(), IncrementDistribution::harmonic()] {
            let q = disk_coefficient_integral(&d, 1, 0, 0.7, 256).unwrap();
            assert!((q.value - 2.0 * PI).norm() < 1e-12, "{:?}", q);
        }
    }

    #[test]
    fn disk_examples() {
        let q = disk_coefficient_integral(&geometric_half(), 1, 1, 0.9, 512).unwrap();
        assert!((q.value.re + 0.9 * PI).abs() < 1e-13);
        let q = disk_coefficient_integral(&explicit(&["0", "1/2", "1/2"]), 0, 2, 0.5, 512).unwrap();
        assert!((q.value.re - 3.0 * PI / 8.0).abs() < 1e-13);
        assert!(q.value.im.abs() < 1e-20);
    }

    #[test]
    fn rejects_bad_arguments() {
        let d = geometric_half();
        assert_eq!(disk_coefficient_integral(&d, 1, 0, 1.0, 64), Err(FourierError::Radius(1.0)));
        assert_eq!(disk_coefficient_integral(&d, 1, 0, 0.5, 63), Err(FourierError::Panels(63)));
        assert_eq!(
            boundary_delta1_integral(&IncrementDistribution::harmonic(), 0, 64),
            Err(FourierError::InfiniteMean)
        );
        assert_eq!(boundary_delta2_integral(&d, 0, 64), Err(FourierError::FiniteMean));
    }

    #[test]
    fn boundary_delta1_geometric() {
        let d = geometric_half();
        let c = |m| boundary_delta1_integral(&d, m, 64).unwrap().coefficient();
        assert!((c(0) - 1.0).norm() < 1e-15);
        assert!((c(1) + 0.5).norm() < 1e-15);
        assert!(c(3).norm() < 1e-15);
    }

    #[test]
    fn boundary_delta2_harmonic_low_modes() {
        let h = IncrementDistribution::harmonic();
        let q0 = boundary_delta2_integral(&h, 0, 4096).unwrap();
        assert!((q0.coefficient().re - 1.0).abs() < 1e-4, "{q0:?}");
        let q1 = boundary_delta2_integral(&h, 1, 4096).unwrap();
        assert!((q1.value.re + 3.0 * PI).abs() < 1e-3, "{q1:?}");
    }

    #[test]
    fn decay_probe_tables() {
        let rows = decay_probe(&geometric_half(), 1, &[4, 8, 16], 64).unwrap();
        assert!(rows.iter().all(|r| r.recurrence == 0.0));
        assert!(rows.iter().all(|r| r.integral.unwrap() < 1e-14));

        let rows = decay_probe(&explicit(&["0", "1/2", "1/2"]), 1, &[8, 16, 32], 64).unwrap();
        assert!(rows.windows(2).all(|w| w[1].recurrence < w[0].recurrence));

        let rows = decay_probe(&IncrementDistribution::harmonic(), 1, &[10], 64).unwrap();
        assert_eq!(rows[0].integral, None);
    }
}
