//! Extended reals with double-double precision.
//!
//! Values of the functional parameter live here. A value is an unevaluated
//! sum `hi + lo` with `|lo| <= ulp(hi) / 2`, which represents integers such
//! as `2^x - 1` or `(x + x^2) / 2` exactly far beyond the 53-bit range of a
//! plain `f64`. `+inf` is carried in `hi` with `lo == 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal { hi: 0.0, lo: 0.0 };
    pub const ONE: ExtReal = ExtReal { hi: 1.0, lo: 0.0 };
    pub const INFINITY: ExtReal = ExtReal {
        hi: f64::INFINITY,
        lo: 0.0,
    };
    pub const NAN: ExtReal = ExtReal {
        hi: f64::NAN,
        lo: 0.0,
    };

    pub fn from_f64(x: f64) -> Self {
        ExtReal { hi: x, lo: 0.0 }
    }

    /// Builds `hi + lo`, renormalizing the pair.
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        if !hi.is_finite() {
            return ExtReal { hi, lo: 0.0 };
        }
        let (s, e) = two_sum(hi, lo);
        ExtReal { hi: s, lo: e }
    }

    /// Exact conversion for every `u64` (at most 64 significant bits).
    pub fn from_u64(n: u64) -> Self {
        let hi = n as f64;
        // `hi` may round up past u64::MAX, so go through i128.
        let lo = (n as i128 - hi as i128) as f64;
        ExtReal::from_parts(hi, lo)
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    /// Nearest `f64`.
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_nan(self) -> bool {
        self.hi.is_nan() || self.lo.is_nan()
    }

    pub fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Integer power by repeated squaring in double-double.
    pub fn powi(self, mut n: u32) -> Self {
        let mut base = self;
        let mut acc = ExtReal::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            n >>= 1;
            if n > 0 {
                base = base * base;
            }
        }
        acc
    }

    /// `2^k` exactly, `+inf` past the exponent range.
    pub fn exp2_int(k: u32) -> Self {
        if k > 1023 {
            ExtReal::INFINITY
        } else {
            ExtReal::from_f64(2f64.powi(k as i32))
        }
    }

    /// Divides by a power of two exactly.
    pub fn halve(self) -> Self {
        ExtReal {
            hi: self.hi * 0.5,
            lo: self.lo * 0.5,
        }
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        if !self.hi.is_finite() || !rhs.hi.is_finite() {
            return ExtReal::from_f64(self.hi + rhs.hi);
        }
        let (s, e) = two_sum(self.hi, rhs.hi);
        if !s.is_finite() {
            return ExtReal::from_f64(s);
        }
        let (t, f) = two_sum(self.lo, rhs.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        ExtReal { hi, lo }
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self + (-rhs)
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: ExtReal) -> ExtReal {
        if !self.hi.is_finite() || !rhs.hi.is_finite() {
            return ExtReal::from_f64(self.hi * rhs.hi);
        }
        let (p, e) = two_prod(self.hi, rhs.hi);
        if !p.is_finite() {
            return ExtReal::from_f64(p);
        }
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        ExtReal { hi, lo }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hi.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.to_f64())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mersenne_numbers_stay_exact() {
        let a = ExtReal::exp2_int(60) - ExtReal::ONE;
        let sum = a + a;
        let next = ExtReal::exp2_int(61) - ExtReal::ONE;
        assert!(sum < next);
        assert_eq!(sum, ExtReal::exp2_int(61) - ExtReal::from_f64(2.0));
    }

    #[test]
    fn products_keep_low_bits() {
        let x = ExtReal::from_u64((1 << 40) + 1);
        let sq = x * x;
        // (2^40 + 1)^2 = 2^80 + 2^41 + 1
        let expect = ExtReal::exp2_int(80) + ExtReal::exp2_int(41) + ExtReal::ONE;
        assert_eq!(sq, expect);
    }

    #[test]
    fn infinity_absorbs() {
        let inf = ExtReal::INFINITY;
        assert!((inf + ExtReal::from_f64(3.0)).is_infinite());
        assert!(inf > ExtReal::from_f64(f64::MAX));
        assert!((ExtReal::from_f64(2.0) * inf).is_infinite());
    }

    #[test]
    fn u64_conversion_is_exact() {
        let n = u64::MAX - 2;
        let x = ExtReal::from_u64(n);
        assert_eq!(x.hi() as i128 + x.lo() as i128, n as i128);
    }

    #[test]
    fn overflow_goes_to_infinity() {
        let big = ExtReal::exp2_int(1000) - ExtReal::ONE;
        assert!((big * ExtReal::exp2_int(30)).is_infinite());
        assert!((ExtReal::from_f64(f64::MAX) + ExtReal::from_f64(f64::MAX)).is_infinite());
        assert!(!(big * ExtReal::exp2_int(30)).is_nan());
    }

    #[test]
    fn powi_matches_integers() {
        assert_eq!(ExtReal::from_f64(3.0).powi(5), ExtReal::from_f64(243.0));
        assert_eq!(ExtReal::from_f64(7.0).powi(0), ExtReal::ONE);
    }
}
