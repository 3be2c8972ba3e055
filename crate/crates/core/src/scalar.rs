//! Scalar fields the sequence algebra runs over: exact rationals and `f64`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational used by every exact computation.
pub type Rational = BigRational;

/// A coefficient type for sequences.
///
/// Implemented for [`Rational`] (exact mode, no rounding anywhere) and
/// `f64` (float mode, IEEE double with compensated summation in the
/// convolution kernel).
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// True when arithmetic in this type never rounds.
    const EXACT: bool;

    fn from_ratio(r: &Rational) -> Self;

    /// Lifts a float into the type. Exact types refuse: a float weight
    /// is not an exact rational specification.
    fn from_float(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs_value(&self) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(&Rational::from_integer(BigInt::from(n)))
    }

    /// `Σ_{i=lo}^{hi} a_i b_{n-i}`. Callers guarantee `hi < a.len()`,
    /// `lo <= hi`, and `n - lo < b.len()`.
    fn cauchy_term(a: &[Self], b: &[Self], lo: usize, hi: usize, n: usize) -> Self {
        let mut acc = Self::zero();
        for i in lo..=hi {
            let ai = &a[i];
            if ai.is_zero() {
                continue;
            }
            let bj = &b[n - i];
            if bj.is_zero() {
                continue;
            }
            acc = acc + ai.clone() * bj.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(r: &Rational) -> Self {
        r.clone()
    }

    fn from_float(_x: f64) -> Option<Self> {
        None
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn from_usize(n: usize) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn cauchy_term(a: &[Self], b: &[Self], lo: usize, hi: usize, n: usize) -> Self {
        // Unreduced products over a running common denominator: one gcd
        // per term, one reduction at the end.
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for i in lo..=hi {
            let (ai, bj) = (&a[i], &b[n - i]);
            if ai.is_zero() || bj.is_zero() {
                continue;
            }
            let tn = ai.numer() * bj.numer();
            let td = ai.denom() * bj.denom();
            let g = den.gcd(&td);
            if g.is_one() {
                num = num * &td + tn * &den;
                den *= td;
            } else {
                let td_g = &td / &g;
                num = num * &td_g + tn * (&den / &g);
                den *= td_g;
            }
        }
        Rational::new(num, den)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(r: &Rational) -> Self {
        ratio_to_f64(r)
    }

    fn from_float(x: f64) -> Option<Self> {
        Some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn from_usize(n: usize) -> Self {
        n as f64
    }

    fn cauchy_term(a: &[f64], b: &[f64], lo: usize, hi: usize, n: usize) -> f64 {
        compensated_cauchy(a, b, lo, hi, n)
    }
}

/// Neumaier-compensated `Σ a_i b_{n-i}` over four interleaved lanes.
///
/// Lane order is fixed, so the result is reproducible bit-for-bit.
pub(crate) fn compensated_cauchy(a: &[f64], b: &[f64], lo: usize, hi: usize, n: usize) -> f64 {
    let a = &a[lo..=hi];
    // b_{n-i} for i = lo..=hi, reversed so both run forward
    let b = &b[n - hi..=n - lo];
    let len = a.len();
    let mut sum = [0.0f64; 4];
    let mut comp = [0.0f64; 4];
    let chunks = len / 4;
    for c in 0..chunks {
        let base = c * 4;
        for lane in 0..4 {
            let x = a[base + lane] * b[len - 1 - (base + lane)];
            let t = sum[lane] + x;
            if sum[lane].abs() >= x.abs() {
                comp[lane] += (sum[lane] - t) + x;
            } else {
                comp[lane] += (x - t) + sum[lane];
            }
            sum[lane] = t;
        }
    }
    let mut total = Neumaier::default();
    for lane in 0..4 {
        total.add(sum[lane]);
        total.add(comp[lane]);
    }
    for i in chunks * 4..len {
        total.add(a[i] * b[len - 1 - i]);
    }
    total.value()
}

/// Running Neumaier (improved Kahan) sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Correctly scaled conversion; `BigRational::to_f64` overflows to NaN
/// when numerator and denominator are individually huge.
pub fn ratio_to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let numer = r.numer();
    let denom = r.denom();
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    if nb < 1000 && db < 1000 {
        if let (Some(n), Some(d)) = (numer.to_f64(), denom.to_f64()) {
            if n.is_finite() && d.is_finite() {
                return n / d;
            }
        }
    }
    // Shift so the quotient keeps 64 significant bits, then rescale.
    let shift = db - nb + 64;
    let q = if shift >= 0 {
        (numer << shift as usize) / denom
    } else {
        numer / (denom << (-shift) as usize)
    };
    // two steps so the scale factor itself cannot underflow
    let half = (-shift / 2) as i32;
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(half) * 2f64.powi(-shift as i32 - half)
}

/// Parses `"num/den"`, an integer, or a plain decimal such as `"0.25"`
/// into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let mut n: BigInt = digits.parse().ok()?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(n, d));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}
