//! Minimal double-double arithmetic and the scalar abstraction the kernels are
//! written against.
//!
//! Only what the antiderivatives need: the four operations, `sqrt`, `ln` and
//! `asin(a/x)`. A [`Dd`] carries ~32 significant digits, which is enough to
//! take differences of large antiderivative values on short branch intervals
//! without losing the digits binary64 would.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub(crate) trait Real:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    /// `arcsin(min(1, a/x))` for `0 ≤ a`, `0 < x`.
    fn asin_ratio(a: Self, x: Self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn is_zero(self) -> bool {
        self.to_f64() == 0.0
    }

    fn powi(self, e: u32) -> Self {
        let mut acc = Self::from_f64(1.0);
        let mut base = self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `√(x² − a²)`, clamped to zero when rounding pushes the radicand negative.
    fn radical(a: Self, x: Self) -> Self {
        let radicand = (x - a) * (x + a);
        if radicand > Self::zero() {
            radicand.sqrt()
        } else {
            Self::zero()
        }
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    fn ln(self) -> Self {
        f64::ln(self)
    }

    fn asin_ratio(a: Self, x: Self) -> Self {
        (a / x).min(1.0).asin()
    }

    fn powi(self, e: u32) -> Self {
        f64::powi(self, e as i32)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

const LN_2: Dd = Dd::from_parts(std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);
const FRAC_PI_2: Dd = Dd::from_parts(std::f64::consts::FRAC_PI_2, 6.123_233_995_736_766e-17);

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

impl Dd {
    pub(crate) const fn from_parts(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    fn normalized(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    fn scale_pow2(self, e: i32) -> Self {
        let f = 2f64.powi(e);
        Self::from_parts(self.hi * f, self.lo * f)
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// `atan(t)` for `0 ≤ t ≤ 1`: eight argument halvings, then the Taylor series.
    fn atan_unit(self) -> Self {
        const HALVINGS: i32 = 8;
        let one = Dd::from_f64(1.0);
        let mut t = self;
        for _ in 0..HALVINGS {
            t = t / (one + (one + t * t).sqrt());
        }
        let t2 = t * t;
        let mut power = t;
        let mut sum = t;
        for j in 1..40 {
            power = -(power * t2);
            let term = power / Dd::from_f64((2 * j + 1) as f64);
            sum = sum + term;
            if term.hi.abs() <= 1e-34 * sum.hi.abs() {
                break;
            }
        }
        sum.scale_pow2(HALVINGS)
    }

    /// `atan2(y, x)` restricted to the first quadrant.
    fn atan2_first_quadrant(y: Dd, x: Dd) -> Dd {
        if y.hi == 0.0 {
            Dd::zero()
        } else if x.hi == 0.0 {
            FRAC_PI_2
        } else if y.hi <= x.hi {
            (y / x).atan_unit()
        } else {
            FRAC_PI_2 - (x / y).atan_unit()
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::normalized(s, e + f)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd::from_parts(-self.hi, -self.lo)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        Dd::normalized(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from_f64(q2);
        let q3 = r.hi / b.hi;
        Dd::normalized(q1, q2) + Dd::from_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Real for Dd {
    fn from_f64(v: f64) -> Self {
        Dd::from_parts(v, 0.0)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::zero();
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let residual = (self.hi - p - e + self.lo) / (2.0 * s);
        Dd::normalized(s, residual)
    }

    /// `ln v = e·ln 2 + 2·atanh((f−1)/(f+1))` with `v = f·2^e`, `f ∈ [1/√2, √2)`.
    fn ln(self) -> Self {
        debug_assert!(self.hi > 0.0);
        let mut e = self.hi.log2().floor() as i32;
        let mut f = self.scale_pow2(-e);
        if f.hi > std::f64::consts::SQRT_2 {
            f = f.scale_pow2(-1);
            e += 1;
        } else if f.hi < std::f64::consts::FRAC_1_SQRT_2 {
            f = f.scale_pow2(1);
            e -= 1;
        }
        let one = Dd::from_f64(1.0);
        let s = (f - one) / (f + one);
        let s2 = s * s;
        let mut power = s;
        let mut sum = s;
        for j in 1..60 {
            power = power * s2;
            let term = power / Dd::from_f64((2 * j + 1) as f64);
            sum = sum + term;
            if term.abs().hi <= 1e-34 * sum.abs().hi {
                break;
            }
        }
        sum.scale_pow2(1) + LN_2 * Dd::from_f64(e as f64)
    }

    fn asin_ratio(a: Self, x: Self) -> Self {
        if a.hi == 0.0 {
            return Dd::zero();
        }
        Dd::atan2_first_quadrant(a, Self::radical(a, x))
    }
}

/// Neumaier-compensated sum, accumulated in descending order of magnitude.
pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in sorted {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}
