//! Increment distributions `q` on the positive integers, their tails
//! `Q_n = Σ_{i>n} q_i`, and means.
//!
//! A distribution is only constructed through validation, so every value
//! of [`IncrementDistribution`] satisfies `q_0 = 0`, `q_n ≥ 0`, unit mass
//! and an aperiodic support (gcd 1).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{parse_rational, ratio_to_f64, Rational, Scalar};

/// Hard cap on the number of series terms any truncated evaluation uses.
pub const MAX_SERIES_TERMS: usize = 1 << 20;

/// Largest accepted deviation of float weights from unit mass before
/// renormalization.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("violates q_0 = 0: weight at index 0 is {0}")]
    NonzeroAtZero(String),
    #[error("violates Σ q_n = 1: total mass deviates from 1 by {deviation:e}")]
    NotNormalized { deviation: f64 },
    #[error("violates q_n ≥ 0: weight at index {index} is negative")]
    NegativeWeight { index: usize },
    #[error("violates gcd{{n ≥ 1 : q_n ≠ 0}} = 1: support gcd is {gcd}")]
    Periodic { gcd: u64 },
    #[error("no weights given")]
    Empty,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed distribution spec: {0}")]
    Spec(String),
    #[error("exact mode requires rational weights with closed-form tails")]
    ExactUnavailable,
}

/// A nonnegative real or `+∞`, with `1/∞ := 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }

    pub fn recip(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => 1.0 / x,
            ExtendedReal::Infinite => 0.0,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    ExplicitFinite,
    Geometric,
    Harmonic,
    CustomSeries,
}

type SeriesFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// A float-valued infinite-support law supplied by the caller.
///
/// The tail bound `n ↦ B_n ≥ Q_n` sets every truncation budget
/// downstream, so it must be a genuine upper bound and nonincreasing.
#[derive(Clone)]
pub struct CustomSeries {
    name: String,
    weight: SeriesFn,
    tail_bound: SeriesFn,
    tail: Option<SeriesFn>,
    mean: ExtendedReal,
}

impl CustomSeries {
    pub fn new(
        name: impl Into<String>,
        weight: impl Fn(usize) -> f64 + Send + Sync + 'static,
        tail_bound: impl Fn(usize) -> f64 + Send + Sync + 'static,
        mean: ExtendedReal,
    ) -> Self {
        Self {
            name: name.into(),
            weight: Arc::new(weight),
            tail_bound: Arc::new(tail_bound),
            tail: None,
            mean,
        }
    }

    /// Supplies `Q_n` directly instead of `1 - Σ_{i≤n} q_i`.
    pub fn with_tail(mut self, tail: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        self.tail = Some(Arc::new(tail));
        self
    }
}

impl fmt::Debug for CustomSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSeries")
            .field("name", &self.name)
            .field("mean", &self.mean)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
struct Explicit {
    weights: Vec<Rational>,
    weights_f64: Vec<f64>,
    // Q_0..Q_{last-1}; Q_n = 0 from the last support index on
    tails: Vec<Rational>,
    tails_f64: Vec<f64>,
    mean: Rational,
    gcd: u64,
}

#[derive(Clone, Debug)]
enum Law {
    Explicit(Explicit),
    Geometric { a: Rational, a_f64: f64 },
    Harmonic,
    Custom(CustomSeries),
}

/// A validated increment law.
#[derive(Clone, Debug)]
pub struct IncrementDistribution {
    law: Law,
    adjustment: f64,
}

impl PartialEq for IncrementDistribution {
    fn eq(&self, other: &Self) -> bool {
        match (&self.law, &other.law) {
            (Law::Explicit(a), Law::Explicit(b)) => a.weights == b.weights,
            (Law::Geometric { a, .. }, Law::Geometric { a: b, .. }) => a == b,
            (Law::Harmonic, Law::Harmonic) => true,
            (Law::Custom(a), Law::Custom(b)) => a.name == b.name && Arc::ptr_eq(&a.weight, &b.weight),
            _ => false,
        }
    }
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl IncrementDistribution {
    /// Validates an explicit finite list of exact weights `q_0, q_1, …`.
    pub fn explicit(weights: Vec<Rational>) -> Result<Self, DistError> {
        if weights.is_empty() {
            return Err(DistError::Empty);
        }
        if !weights[0].is_zero() {
            return Err(DistError::NonzeroAtZero(weights[0].to_string()));
        }
        if let Some(index) = weights.iter().position(|w| w.is_negative()) {
            return Err(DistError::NegativeWeight { index });
        }
        let total: Rational = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(DistError::NotNormalized {
                deviation: ratio_to_f64(&(total - Rational::one())),
            });
        }
        let mut weights = weights;
        while weights.last().is_some_and(Zero::is_zero) {
            weights.pop();
        }
        let gcd = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .fold(0u64, |g, (n, _)| g.gcd(&(n as u64)));
        if gcd != 1 {
            return Err(DistError::Periodic { gcd });
        }
        let last = weights.len() - 1;
        let mut tails = Vec::with_capacity(last);
        let mut tail = Rational::one();
        for w in &weights[..last] {
            tail -= w;
            tails.push(tail.clone());
        }
        let mean = tails.iter().cloned().sum::<Rational>();
        Ok(Self {
            law: Law::Explicit(Explicit {
                weights_f64: weights.iter().map(ratio_to_f64).collect(),
                tails_f64: tails.iter().map(ratio_to_f64).collect(),
                weights,
                tails,
                mean,
                gcd,
            }),
            adjustment: 0.0,
        })
    }

    /// Validates float weights. Mass within [`NORMALIZATION_TOLERANCE`] of 1
    /// is corrected exactly by adjusting the largest weight; the size of
    /// that correction is kept in [`Self::normalization_adjustment`].
    pub fn from_float_weights(weights: &[f64]) -> Result<Self, DistError> {
        if weights.is_empty() {
            return Err(DistError::Empty);
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(DistError::InvalidParameter(format!("weight at index {index} is not finite")));
        }
        if weights[0] != 0.0 {
            return Err(DistError::NonzeroAtZero(weights[0].to_string()));
        }
        if let Some(index) = weights.iter().position(|w| *w < 0.0) {
            return Err(DistError::NegativeWeight { index });
        }
        let mut exact: Vec<Rational> = weights
            .iter()
            .map(|w| Rational::from_float(*w).expect("finite"))
            .collect();
        let total: Rational = exact.iter().cloned().sum();
        let deficit = Rational::one() - total;
        let deviation = ratio_to_f64(&deficit);
        if deviation.abs() > NORMALIZATION_TOLERANCE {
            return Err(DistError::NotNormalized { deviation: -deviation });
        }
        let largest = (0..weights.len())
            .max_by(|&i, &j| weights[i].total_cmp(&weights[j]).then(j.cmp(&i)))
            .expect("nonempty");
        exact[largest] += deficit;
        let mut dist = Self::explicit(exact)?;
        dist.adjustment = deviation;
        Ok(dist)
    }

    /// `Q_n = a^n`, i.e. `q_n = (1-a) a^{n-1}` for `n ≥ 1`, with `0 ≤ a < 1`.
    pub fn geometric(a: Rational) -> Result<Self, DistError> {
        if a.is_negative() || a >= Rational::one() {
            return Err(DistError::InvalidParameter(format!("geometric ratio must lie in [0, 1), got {a}")));
        }
        let a_f64 = ratio_to_f64(&a);
        Ok(Self {
            law: Law::Geometric { a, a_f64 },
            adjustment: 0.0,
        })
    }

    /// `q_n = 1/(n(n+1))`: tails `Q_n = 1/(n+1)`, infinite mean.
    pub fn harmonic() -> Self {
        Self {
            law: Law::Harmonic,
            adjustment: 0.0,
        }
    }

    /// Validates a custom series on the prefix where its tail bound
    /// exceeds `1e-12`. A scanned support with gcd 1 certifies
    /// aperiodicity of the whole support.
    pub fn custom(series: CustomSeries) -> Result<Self, DistError> {
        let w0 = (series.weight)(0);
        if w0 != 0.0 {
            return Err(DistError::NonzeroAtZero(w0.to_string()));
        }
        if let ExtendedReal::Finite(m) = series.mean {
            if m.is_nan() || m < 1.0 {
                return Err(DistError::InvalidParameter(format!("mean {m} is below 1")));
            }
        }
        let horizon = budget_from_bound(|n| (series.tail_bound)(n), NORMALIZATION_TOLERANCE);
        let mut mass = crate::scalar::Neumaier::default();
        let mut gcd = 0u64;
        for n in 1..=horizon {
            let w = (series.weight)(n);
            if !w.is_finite() || w < 0.0 {
                return Err(DistError::NegativeWeight { index: n });
            }
            if w > 0.0 {
                gcd = gcd.gcd(&(n as u64));
            }
            mass.add(w);
        }
        let deviation = mass.value() - 1.0;
        if deviation.abs() > NORMALIZATION_TOLERANCE + (series.tail_bound)(horizon) {
            return Err(DistError::NotNormalized { deviation });
        }
        if gcd != 1 {
            return Err(DistError::Periodic { gcd });
        }
        Ok(Self {
            law: Law::Custom(series),
            adjustment: 0.0,
        })
    }

    pub fn from_spec(spec: &DistSpec) -> Result<Self, DistError> {
        match spec {
            DistSpec::Explicit { explicit } => {
                if explicit.iter().all(|w| matches!(w, WeightLiteral::Exact(_))) {
                    let weights = explicit
                        .iter()
                        .map(|w| match w {
                            WeightLiteral::Exact(s) => parse_rational(s)
                                .ok_or_else(|| DistError::Spec(format!("cannot parse weight {s:?} as a rational"))),
                            WeightLiteral::Float(_) => unreachable!(),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Self::explicit(weights)
                } else {
                    let weights = explicit
                        .iter()
                        .map(|w| match w {
                            WeightLiteral::Exact(s) => parse_rational(s)
                                .map(|r| ratio_to_f64(&r))
                                .ok_or_else(|| DistError::Spec(format!("cannot parse weight {s:?}"))),
                            WeightLiteral::Float(x) => Ok(*x),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Self::from_float_weights(&weights)
                }
            }
            DistSpec::Family { family, a } => match family.as_str() {
                "geometric" => {
                    let a = a
                        .as_deref()
                        .ok_or_else(|| DistError::Spec("geometric family needs parameter \"a\"".into()))?;
                    let a = parse_rational(a).ok_or_else(|| DistError::Spec(format!("cannot parse a = {a:?}")))?;
                    Self::geometric(a)
                }
                "harmonic" => Ok(Self::harmonic()),
                other => Err(DistError::Spec(format!("unknown family {other:?}"))),
            },
        }
    }

    /// The spec this distribution was built from, when it has one.
    pub fn to_spec(&self) -> Option<DistSpec> {
        match &self.law {
            Law::Explicit(e) => Some(DistSpec::Explicit {
                explicit: e.weights.iter().map(|w| WeightLiteral::Exact(w.to_string())).collect(),
            }),
            Law::Geometric { a, .. } => Some(DistSpec::Family {
                family: "geometric".into(),
                a: Some(a.to_string()),
            }),
            Law::Harmonic => Some(DistSpec::Family {
                family: "harmonic".into(),
                a: None,
            }),
            Law::Custom(_) => None,
        }
    }

    pub fn kind(&self) -> DistKind {
        match self.law {
            Law::Explicit(_) => DistKind::ExplicitFinite,
            Law::Geometric { .. } => DistKind::Geometric,
            Law::Harmonic => DistKind::Harmonic,
            Law::Custom(_) => DistKind::CustomSeries,
        }
    }

    pub fn label(&self) -> String {
        match &self.law {
            Law::Explicit(e) => {
                let ws: Vec<String> = e.weights.iter().map(ToString::to_string).collect();
                format!("explicit({})", ws.join(", "))
            }
            Law::Geometric { a, .. } => format!("geometric({a})"),
            Law::Harmonic => "harmonic".into(),
            Law::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// Largest index with nonzero weight, or `None` for infinite support.
    pub fn support_bound(&self) -> Option<usize> {
        match &self.law {
            Law::Explicit(e) => Some(e.weights.len() - 1),
            Law::Geometric { a, .. } if a.is_zero() => Some(1),
            _ => None,
        }
    }

    /// gcd of the support: computed for explicit laws, certified for the
    /// named families (both have `q_1 > 0`), scanned for custom series.
    pub fn support_gcd(&self) -> u64 {
        match &self.law {
            Law::Explicit(e) => e.gcd,
            _ => 1,
        }
    }

    /// Whether exact-rational evaluation of weights and tails is available.
    pub fn is_rational(&self) -> bool {
        !matches!(self.law, Law::Custom(_))
    }

    pub fn normalization_adjustment(&self) -> f64 {
        self.adjustment
    }

    pub fn mean(&self) -> ExtendedReal {
        match &self.law {
            Law::Explicit(e) => ExtendedReal::Finite(ratio_to_f64(&e.mean)),
            Law::Geometric { a_f64, .. } => ExtendedReal::Finite(1.0 / (1.0 - a_f64)),
            Law::Harmonic => ExtendedReal::Infinite,
            Law::Custom(c) => c.mean,
        }
    }

    pub fn mean_exact(&self) -> Option<Rational> {
        match &self.law {
            Law::Explicit(e) => Some(e.mean.clone()),
            Law::Geometric { a, .. } => Some((Rational::one() - a).recip()),
            _ => None,
        }
    }

    pub fn has_finite_mean(&self) -> bool {
        self.mean().is_finite()
    }

    pub fn weight_exact(&self, n: usize) -> Option<Rational> {
        match &self.law {
            Law::Explicit(e) => Some(e.weights.get(n).cloned().unwrap_or_else(Rational::zero)),
            Law::Geometric { a, .. } => Some(if n == 0 {
                Rational::zero()
            } else {
                (Rational::one() - a) * num_traits::pow(a.clone(), n - 1)
            }),
            Law::Harmonic => Some(if n == 0 {
                Rational::zero()
            } else {
                rat(1, 1) / Rational::from_integer(BigInt::from(n) * BigInt::from(n + 1))
            }),
            Law::Custom(_) => None,
        }
    }

    pub fn tail_exact(&self, n: usize) -> Option<Rational> {
        match &self.law {
            Law::Explicit(e) => Some(e.tails.get(n).cloned().unwrap_or_else(Rational::zero)),
            Law::Geometric { a, .. } => Some(num_traits::pow(a.clone(), n)),
            Law::Harmonic => Some(Rational::new(BigInt::one(), BigInt::from(n + 1))),
            Law::Custom(_) => None,
        }
    }

    pub fn weight_f64(&self, n: usize) -> f64 {
        match &self.law {
            Law::Explicit(e) => e.weights_f64.get(n).copied().unwrap_or(0.0),
            Law::Geometric { a_f64, .. } => {
                if n == 0 {
                    0.0
                } else {
                    (1.0 - a_f64) * a_f64.powi((n - 1).min(i32::MAX as usize) as i32)
                }
            }
            Law::Harmonic => {
                if n == 0 {
                    0.0
                } else {
                    let n = n as f64;
                    1.0 / (n * (n + 1.0))
                }
            }
            Law::Custom(c) => (c.weight)(n),
        }
    }

    pub fn tail_f64(&self, n: usize) -> f64 {
        match &self.law {
            Law::Explicit(e) => e.tails_f64.get(n).copied().unwrap_or(0.0),
            Law::Geometric { a_f64, .. } => a_f64.powi(n.min(i32::MAX as usize) as i32),
            Law::Harmonic => 1.0 / (n as f64 + 1.0),
            Law::Custom(c) => match &c.tail {
                Some(t) => t(n),
                None => {
                    let mut mass = crate::scalar::Neumaier::default();
                    for i in 1..=n {
                        mass.add((c.weight)(i));
                    }
                    (1.0 - mass.value()).clamp(0.0, 1.0)
                }
            },
        }
    }

    /// Upper bound on `Q_n`; the tail itself for every law but custom.
    pub fn tail_bound(&self, n: usize) -> f64 {
        match &self.law {
            Law::Custom(c) => (c.tail_bound)(n),
            _ => self.tail_f64(n),
        }
    }

    pub fn weight<S: Scalar>(&self, n: usize) -> Result<S, DistError> {
        if S::EXACT {
            self.weight_exact(n).map(|w| S::from_ratio(&w)).ok_or(DistError::ExactUnavailable)
        } else {
            S::from_float(self.weight_f64(n)).ok_or(DistError::ExactUnavailable)
        }
    }

    /// `Q_n = Σ_{i>n} q_i`.
    pub fn tail<S: Scalar>(&self, n: usize) -> Result<S, DistError> {
        if S::EXACT {
            self.tail_exact(n).map(|w| S::from_ratio(&w)).ok_or(DistError::ExactUnavailable)
        } else {
            S::from_float(self.tail_f64(n)).ok_or(DistError::ExactUnavailable)
        }
    }

    /// `q_0, …, q_upto` (shorter for explicit laws, whose weights vanish
    /// past the support).
    pub fn weights_prefix<S: Scalar>(&self, upto: usize) -> Result<Vec<S>, DistError> {
        let last = self.support_bound().map_or(upto, |b| b.min(upto));
        if !S::EXACT {
            if let Law::Explicit(e) = &self.law {
                return Ok(e.weights_f64[..=last]
                    .iter()
                    .map(|w| S::from_float(*w).expect("float scalar"))
                    .collect());
            }
        }
        (0..=last).map(|n| self.weight(n)).collect()
    }

    /// Smallest `N` with `Q_N ≤ target` (by the tail bound), capped at
    /// [`MAX_SERIES_TERMS`].
    pub fn truncation_budget(&self, target: f64) -> usize {
        match &self.law {
            Law::Explicit(e) => e.weights.len() - 1,
            Law::Geometric { a_f64, .. } => {
                if *a_f64 == 0.0 {
                    1
                } else {
                    let n = (target.ln() / a_f64.ln()).ceil().max(1.0);
                    (n as usize).min(MAX_SERIES_TERMS)
                }
            }
            Law::Harmonic => {
                let n = (1.0 / target - 1.0).ceil().max(1.0);
                if n >= MAX_SERIES_TERMS as f64 {
                    MAX_SERIES_TERMS
                } else {
                    n as usize
                }
            }
            Law::Custom(c) => budget_from_bound(|n| (c.tail_bound)(n), target),
        }
    }

    /// `Σ_{i=0}^{M} Q_i`.
    pub fn tail_sum<S: Scalar>(&self, upto: usize) -> Result<S, DistError> {
        match &self.law {
            Law::Explicit(e) => {
                let end = upto.min(e.tails.len().saturating_sub(1));
                if S::EXACT {
                    Ok(S::from_ratio(&e.tails[..=end].iter().cloned().sum()))
                } else {
                    Ok(sum_f64::<S>(e.tails_f64[..=end].iter().copied()))
                }
            }
            Law::Geometric { a, a_f64 } => {
                if S::EXACT {
                    let one = Rational::one();
                    Ok(S::from_ratio(
                        &((&one - num_traits::pow(a.clone(), upto + 1)) / (&one - a)),
                    ))
                } else {
                    Ok(sum_f64::<S>((0..=upto).map(|i| a_f64.powi(i.min(i32::MAX as usize) as i32))))
                }
            }
            Law::Harmonic => {
                if S::EXACT {
                    Ok(S::from_ratio(&harmonic_number(upto + 1)))
                } else {
                    Ok(sum_f64::<S>((0..=upto).map(|i| 1.0 / (i as f64 + 1.0))))
                }
            }
            Law::Custom(_) => {
                if S::EXACT {
                    return Err(DistError::ExactUnavailable);
                }
                Ok(sum_f64::<S>((0..=upto).map(|i| self.tail_f64(i))))
            }
        }
    }

    /// `Σ_{i>M} Q_i`, or `None` when the mean is infinite.
    pub fn tail_remainder<S: Scalar>(&self, upto: usize) -> Result<Option<S>, DistError> {
        match &self.law {
            Law::Explicit(e) => {
                let start = upto + 1;
                if start >= e.tails.len() {
                    return Ok(Some(S::zero()));
                }
                if S::EXACT {
                    Ok(Some(S::from_ratio(&e.tails[start..].iter().cloned().sum())))
                } else {
                    Ok(Some(sum_f64::<S>(e.tails_f64[start..].iter().copied())))
                }
            }
            Law::Geometric { a, a_f64 } => {
                if S::EXACT {
                    Ok(Some(S::from_ratio(
                        &(num_traits::pow(a.clone(), upto + 1) / (Rational::one() - a)),
                    )))
                } else {
                    let v = a_f64.powi((upto + 1).min(i32::MAX as usize) as i32) / (1.0 - a_f64);
                    Ok(S::from_float(v))
                }
            }
            Law::Harmonic => Ok(None),
            Law::Custom(c) => {
                if S::EXACT {
                    return Err(DistError::ExactUnavailable);
                }
                match c.mean {
                    ExtendedReal::Infinite => Ok(None),
                    ExtendedReal::Finite(m) => {
                        let head: f64 = self.tail_sum::<f64>(upto)?;
                        Ok(S::from_float((m - head).max(0.0)))
                    }
                }
            }
        }
    }

    /// For laws with a known closed form on the unit disk.
    pub(crate) fn geometric_ratio(&self) -> Option<f64> {
        match &self.law {
            Law::Geometric { a_f64, .. } => Some(*a_f64),
            _ => None,
        }
    }

    pub(crate) fn is_harmonic(&self) -> bool {
        matches!(self.law, Law::Harmonic)
    }

    pub(crate) fn explicit_weights(&self) -> Option<&[Rational]> {
        match &self.law {
            Law::Explicit(e) => Some(&e.weights),
            _ => None,
        }
    }

    pub(crate) fn explicit_tails(&self) -> Option<&[Rational]> {
        match &self.law {
            Law::Explicit(e) => Some(&e.tails),
            _ => None,
        }
    }
}

fn sum_f64<S: Scalar>(xs: impl Iterator<Item = f64>) -> S {
    let mut acc = crate::scalar::Neumaier::default();
    xs.for_each(|x| acc.add(x));
    S::from_float(acc.value()).expect("float scalar")
}

/// `H_n = Σ_{k=1}^n 1/k` exactly.
pub fn harmonic_number(n: usize) -> Rational {
    // accumulate over a common denominator to avoid a gcd per step
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for k in 1..=n {
        let k = BigInt::from(k);
        num = num * &k + &den;
        den *= k;
        if den.bits() > 4096 {
            let g = num.gcd(&den);
            num /= &g;
            den /= &g;
        }
    }
    Rational::new(num, den)
}

fn budget_from_bound(bound: impl Fn(usize) -> f64, target: f64) -> usize {
    let mut hi = 1usize;
    while bound(hi) > target {
        if hi >= MAX_SERIES_TERMS {
            return MAX_SERIES_TERMS;
        }
        hi = (hi * 2).min(MAX_SERIES_TERMS);
    }
    let mut lo = hi / 2;
    // bound(lo) > target or lo == 0
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// A single weight literal: an exact `"num/den"` (or integer / decimal)
/// string, or a JSON float that goes through float validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightLiteral {
    Exact(String),
    Float(f64),
}

/// The JSON distribution spec: `{"explicit": ["0", "1/2", "1/2"]}`,
/// `{"family": "geometric", "a": "1/2"}` or `{"family": "harmonic"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistSpec {
    Explicit {
        explicit: Vec<WeightLiteral>,
    },
    Family {
        family: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<String>,
    },
}
