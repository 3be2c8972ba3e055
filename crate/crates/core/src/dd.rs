//! Double-double arithmetic (about 106 significant bits).
//!
//! Only what the quadrature needs: ring operations, division, and exact
//! roots of unity on a uniform grid.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::scalar::{ratio_to_f64, Rational};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

pub(crate) const DD_PI: Dd = Dd {
    hi: std::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_ratio(r: &Rational) -> Self {
        let hi = ratio_to_f64(r);
        let rest = r - Rational::from_float(hi).expect("finite");
        Dd::from_parts(hi, ratio_to_f64(&rest))
    }

    fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::from_parts(s, e + f)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        Dd::from_parts(p, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from_f64(q2);
        let q3 = r.hi / o.hi;
        Dd::from_parts(q1, q2) + Dd::from_f64(q3)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: DdComplex = DdComplex {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        Self { re, im }
    }

    pub fn from_c64(z: Complex64) -> Self {
        Self::new(Dd::from_f64(z.re), Dd::from_f64(z.im))
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(self, k: Dd) -> Self {
        Self::new(self.re * k, self.im * k)
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, o: DdComplex) -> DdComplex {
        DdComplex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, o: DdComplex) -> DdComplex {
        DdComplex::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    fn neg(self) -> DdComplex {
        DdComplex::new(-self.re, -self.im)
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, o: DdComplex) -> DdComplex {
        DdComplex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, o: DdComplex) -> DdComplex {
        let den = o.norm_sqr();
        let num = self * DdComplex::new(o.re, -o.im);
        DdComplex::new(num.re / den, num.im / den)
    }
}

/// `(sin x, cos x)` for `|x| ≤ π/4` by Taylor series.
fn sin_cos_small(x: Dd) -> (Dd, Dd) {
    let x2 = x * x;
    let mut sin = x;
    let mut cos = Dd::ONE;
    let mut term_s = x;
    let mut term_c = Dd::ONE;
    let mut k = 1.0;
    loop {
        term_c = -(term_c * x2) / Dd::from_f64(k * (k + 1.0));
        term_s = -(term_s * x2) / Dd::from_f64((k + 1.0) * (k + 2.0));
        cos = cos + term_c;
        sin = sin + term_s;
        if term_c.hi.abs() < 1e-36 && term_s.hi.abs() < 1e-36 {
            break;
        }
        k += 2.0;
    }
    (sin, cos)
}

/// `e^{2πi j/P}` for `j = 0..P`, accurate to double-double precision.
pub(crate) fn roots_of_unity(panels: usize) -> Vec<DdComplex> {
    (0..panels)
        .map(|j| {
            // reduce 8j/P to the nearest quadrant and a residual angle
            let quadrant = ((4 * j + panels / 2) / panels) % 4;
            let residual_num = 4 * j as i64 - (((4 * j + panels / 2) / panels) as i64) * panels as i64;
            // angle = (π/2)·residual_num/P
            let angle = (DD_PI * Dd::from_f64(residual_num as f64)) / Dd::from_f64(2.0 * panels as f64);
            let (s, c) = sin_cos_small(angle);
            match quadrant {
                0 => DdComplex::new(c, s),
                1 => DdComplex::new(-s, c),
                2 => DdComplex::new(-c, -s),
                _ => DdComplex::new(s, -c),
            }
        })
        .collect()
}
