//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`, giving
//! roughly 106 bits of significand with the exponent range of `f64`. Only the
//! operations needed by the radial recurrences are provided.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigUint;

/// Extended-precision real, stored as a normalized pair of `f64`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if !p.is_finite() {
        return (p, 0.0);
    }
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Dd {
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        // An overflowed `hi` can sit next to a `lo` of the opposite infinity.
        if self.hi.is_infinite() {
            return self.hi;
        }
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_sign_positive_nonzero(self) -> bool {
        self.hi > 0.0
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    /// Square root by one Newton correction of the `f64` root.
    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Dd::ZERO
            } else {
                Dd::from_f64(f64::NAN)
            };
        }
        let s = libm::sqrt(self.hi);
        let s2 = Dd::from_f64(s) * Dd::from_f64(s);
        let correction = (self - s2).to_f64() / (2.0 * s);
        Dd::from_f64(s) + Dd::from_f64(correction)
    }

    /// Multiplies by `2^exp` exactly (barring over/underflow).
    pub fn ldexp(self, exp: i32) -> Dd {
        Dd {
            hi: libm::scalbn(self.hi, exp),
            lo: libm::scalbn(self.lo, exp),
        }
    }

    /// Converts an arbitrary-precision integer, keeping its top 159 bits.
    pub fn from_biguint(n: &BigUint) -> Dd {
        let (top, shift) = top_bits(n);
        let shift = i32::try_from(shift).unwrap_or(i32::MAX);
        top.ldexp(shift)
    }

    /// `num / den` rounded to double-double precision, without forming
    /// either operand as a float (both may be far beyond `f64::MAX`).
    pub fn ratio(num: &BigUint, den: &BigUint) -> Dd {
        assert!(den.bits() > 0, "division by zero in Dd::ratio");
        if num.bits() == 0 {
            return Dd::ZERO;
        }
        let (n, sn) = top_bits(num);
        let (d, sd) = top_bits(den);
        let exp = sn as i64 - sd as i64;
        let exp = exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        (n / d).ldexp(exp)
    }
}

/// Splits `n` into a double-double holding its leading bits and the
/// power-of-two scale that was shifted out.
fn top_bits(n: &BigUint) -> (Dd, u64) {
    const KEEP: u64 = 159;
    let bits = n.bits();
    let shift = bits.saturating_sub(KEEP);
    let top = if shift > 0 { n >> shift } else { n.clone() };
    let digits = top.to_u64_digits();
    // Accumulate from the most significant limb: each step is exact up to
    // the double-double rounding of the final sum.
    let mut acc = Dd::ZERO;
    for &limb in digits.iter().rev() {
        let hi = (limb >> 32) as f64;
        let lo = (limb & 0xffff_ffff) as f64;
        acc = acc.ldexp(64) + Dd::from_f64(hi).ldexp(32) + Dd::from_f64(lo);
    }
    (acc, shift)
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl From<u64> for Dd {
    fn from(x: u64) -> Dd {
        let hi = x as f64;
        // `hi` may round up past u64::MAX; compute the remainder in i128.
        let rem = x as i128 - hi as i128;
        Dd::renorm(hi, rem as f64)
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

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        if !s.is_finite() {
            return Dd { hi: s, lo: 0.0 };
        }
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::renorm(s, e + f)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        if !p.is_finite() {
            return Dd { hi: p, lo: 0.0 };
        }
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        Dd::renorm(p, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        if !q1.is_finite() || q1 == 0.0 {
            return Dd::from_f64(q1);
        }
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        Dd::renorm(q1, q2) + Dd::from_f64(q3)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, rhs: f64) -> Dd {
        self + Dd::from_f64(rhs)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, rhs: f64) -> Dd {
        self * Dd::from_f64(rhs)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}
