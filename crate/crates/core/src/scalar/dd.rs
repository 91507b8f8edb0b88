//! Double-double numbers: unevaluated sums of two machine doubles.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::eft::{quick_two_sum, two_prod, two_sum};

/// A number stored as `hi + lo` where the pair is non-overlapping:
/// `fl(hi + lo) == hi` and `|lo| <= ulp(hi) / 2`. Roughly 106 significand
/// bits, unit roundoff 2^-104.
///
/// Arithmetic keeps the relative error within `8 * DoubleDouble::EPSILON`
/// of the exact result and always returns a normalized pair. Overflow and
/// NaN propagate as they do for plain doubles.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    /// Unit roundoff of the format: 2^-104.
    pub const EPSILON: f64 = 4.930380657631324e-32;

    /// Builds a normalized value from two arbitrary doubles.
    #[inline]
    pub fn new(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    /// Builds from components already known to be non-overlapping.
    #[inline]
    pub(crate) fn from_normalized(hi: f64, lo: f64) -> Self {
        debug_assert!(hi == 0.0 || hi + lo == hi || !hi.is_finite(), "components overlap");
        Self { hi, lo }
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
    pub fn from_f64(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    /// Exact conversion of an integer (rounds once if |v| >= 2^106).
    pub fn from_i128(v: i128) -> Self {
        let hi = v as f64;
        let rem = v - hi as i128;
        let lo = rem as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    /// Nearest double.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// True when the representation invariant holds.
    pub fn is_normalized(self) -> bool {
        if self.hi == 0.0 {
            return self.lo == 0.0;
        }
        self.hi + self.lo == self.hi
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Square root for non-negative inputs (callers check the sign).
    ///
    /// One step of a Karp-Markstein style correction on the double-precision
    /// estimate: `sqrt(a) ~ x*a.hi + (a - (x*a.hi)^2) * x/2` with `x = 1/sqrt(a.hi)`.
    pub(crate) fn sqrt_unchecked(self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let (sq_hi, sq_lo) = two_prod(ax, ax);
        let residual = self - Self::from_normalized(sq_hi, sq_lo);
        let (hi, lo) = two_sum(ax, residual.hi * (x * 0.5));
        Self { hi, lo }
    }

    /// Self * b with b a plain double.
    #[inline]
    pub(crate) fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    /// Self + b with b a plain double.
    #[inline]
    pub(crate) fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    /// Accurate double-double addition (both error terms carried through
    /// two renormalization passes), robust under cancellation.
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, te) = two_sum(self.lo, rhs.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + te;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    /// Every subexpression is symmetric in the operands (IEEE `+` and `*`
    /// commute), so multiplication is bitwise commutative.
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let cross = self.hi * rhs.lo + self.lo * rhs.hi;
        let tail = cross + self.lo * rhs.lo;
        let (hi, lo) = quick_two_sum(p, e + tail);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;

    /// Long division: three quotient terms, each peeled off with a full
    /// double-double remainder update. Division by zero yields infinities.
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs.mul_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs.mul_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Self::from_normalized(s, e).add_f64(q3)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for DoubleDouble {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for DoubleDouble {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Zero for DoubleDouble {
    #[inline]
    fn zero() -> Self {
        Self::ZERO
    }

    #[inline]
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    #[inline]
    fn one() -> Self {
        Self::ONE
    }
}

impl PartialOrd for DoubleDouble {
    /// Lexicographic on (hi, lo); correct for normalized values.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::decimal::format_components(&[self.hi, self.lo], 33))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_is_two_pow_minus_104() {
        assert_eq!(DoubleDouble::EPSILON, 2f64.powi(-104));
    }

    #[test]
    fn add_of_exact_opposites_is_zero() {
        let one = DoubleDouble::ONE;
        assert!((one + (-one)).is_zero());
    }

    #[test]
    fn add_zero_is_identity() {
        let x = DoubleDouble::ONE / DoubleDouble::from_f64(3.0);
        let y = x + DoubleDouble::ZERO;
        assert_eq!(x, y);
    }

    #[test]
    fn results_are_normalized() {
        let a = DoubleDouble::ONE / DoubleDouble::from_f64(3.0);
        let b = DoubleDouble::from_f64(7.0) / DoubleDouble::from_f64(11.0);
        for v in [a + b, a - b, a * b, a / b, a.sqrt_unchecked()] {
            assert!(v.is_normalized(), "{v:?}");
        }
    }

    #[test]
    fn from_i128_splits_exactly() {
        let v = (1i128 << 80) + 12345;
        let x = DoubleDouble::from_i128(v);
        assert!(x.is_normalized());
        // hi + lo reassembles the integer exactly
        assert_eq!(x.hi() as i128 + x.lo() as i128, v);
    }

    #[test]
    fn ordering_uses_low_word() {
        let a = DoubleDouble::new(1.0, 1e-20);
        let b = DoubleDouble::new(1.0, 2e-20);
        assert!(a < b);
        assert!(DoubleDouble::from_f64(-1.0) < DoubleDouble::ZERO);
    }
}
