//! Scalar kernels: error-free transformations, the double-double and
//! quad-double types, the common scalar interface, and operation counting.

pub mod eft;

mod counted;
mod dd;
pub(crate) mod decimal;
mod qd;

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

pub use counted::{with_op_counts, Counted, OpCounts};
pub use dd::DoubleDouble;
pub use eft::assert_round_to_nearest;
pub use qd::QuadDouble;

use crate::error::{Error, Result};

/// The number interface every algorithm in this crate is generic over.
///
/// Implemented by plain `f64` (handy as a cheap cross-check), by
/// [`DoubleDouble`] and [`QuadDouble`], and by [`Counted<T>`] which wraps any
/// of them without changing a single bit of the results.
///
/// Values are immutable plain data (`Copy + Send + Sync`), so they can move
/// freely between worker threads.
pub trait Scalar:
    Copy
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// Short format label ("f64", "dd", "qd"); appears in matrix file
    /// headers and CSV output.
    fn precision_label() -> &'static str;

    /// Unit roundoff of the format as a plain double.
    fn unit_roundoff() -> f64;

    /// Unit roundoff as a value of the format itself.
    fn epsilon() -> Self {
        Self::from_f64(Self::unit_roundoff())
    }

    /// Significant digits that guarantee print -> parse identity.
    fn roundtrip_digits() -> usize;

    /// Exact embedding of a double.
    fn from_f64(v: f64) -> Self;

    fn from_i128(v: i128) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_i128(v as i128)
    }

    fn from_usize(v: usize) -> Self {
        Self::from_i128(v as i128)
    }

    /// Nearest double approximation.
    fn to_f64(self) -> f64;

    fn abs(self) -> Self;

    /// Square root; negative input is a domain error.
    fn try_sqrt(self) -> Result<Self>;

    /// Division with an explicit zero-divisor error. The `/` operator keeps
    /// machine semantics (infinities propagate).
    fn try_div(self, rhs: Self) -> Result<Self> {
        if rhs.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / rhs)
        }
    }

    /// Parses `[+-]digits[.digits][e[+-]digits]`, correctly rounded.
    fn parse_decimal(s: &str) -> Result<Self>;

    /// Correctly rounded decimal with `ndigits` significant digits.
    fn to_decimal_string(self, ndigits: usize) -> String;

    /// Exact terminating decimal; parsing it back is always the identity.
    fn to_decimal_string_exact(self) -> String;

    fn is_finite(self) -> bool;

    /// Bit-for-bit equality of the underlying representation.
    fn bit_eq(self, other: Self) -> bool;

    /// Total order for finite values.
    fn compare(self, other: Self) -> Ordering {
        self.partial_cmp(&other).expect("comparable scalar values")
    }
}

impl Scalar for f64 {
    fn precision_label() -> &'static str {
        "f64"
    }

    fn unit_roundoff() -> f64 {
        f64::EPSILON
    }

    fn roundtrip_digits() -> usize {
        17
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn from_i128(v: i128) -> Self {
        v as f64
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn try_sqrt(self) -> Result<Self> {
        if self < 0.0 {
            Err(Error::NegativeSqrt)
        } else {
            Ok(self.sqrt())
        }
    }

    fn parse_decimal(s: &str) -> Result<Self> {
        let [v] = decimal::parse_to_components::<1>(s)?;
        Ok(v)
    }

    fn to_decimal_string(self, ndigits: usize) -> String {
        decimal::format_components(&[self], ndigits)
    }

    fn to_decimal_string_exact(self) -> String {
        decimal::format_components_exact(&[self])
    }

    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn bit_eq(self, other: Self) -> bool {
        self.to_bits() == other.to_bits()
    }
}

impl Scalar for DoubleDouble {
    fn precision_label() -> &'static str {
        "dd"
    }

    fn unit_roundoff() -> f64 {
        Self::EPSILON
    }

    fn roundtrip_digits() -> usize {
        33
    }

    fn from_f64(v: f64) -> Self {
        DoubleDouble::from_f64(v)
    }

    fn from_i128(v: i128) -> Self {
        DoubleDouble::from_i128(v)
    }

    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }

    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }

    fn try_sqrt(self) -> Result<Self> {
        if self < Self::ZERO {
            Err(Error::NegativeSqrt)
        } else {
            Ok(self.sqrt_unchecked())
        }
    }

    fn parse_decimal(s: &str) -> Result<Self> {
        let [hi, lo] = decimal::parse_to_components::<2>(s)?;
        Ok(DoubleDouble::new(hi, lo))
    }

    fn to_decimal_string(self, ndigits: usize) -> String {
        decimal::format_components(&[self.hi(), self.lo()], ndigits)
    }

    fn to_decimal_string_exact(self) -> String {
        decimal::format_components_exact(&[self.hi(), self.lo()])
    }

    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }

    fn bit_eq(self, other: Self) -> bool {
        self.hi().to_bits() == other.hi().to_bits() && self.lo().to_bits() == other.lo().to_bits()
    }
}

impl Scalar for QuadDouble {
    fn precision_label() -> &'static str {
        "qd"
    }

    fn unit_roundoff() -> f64 {
        Self::EPSILON
    }

    fn roundtrip_digits() -> usize {
        65
    }

    fn from_f64(v: f64) -> Self {
        QuadDouble::from_f64(v)
    }

    fn from_i128(v: i128) -> Self {
        QuadDouble::from_i128(v)
    }

    fn to_f64(self) -> f64 {
        QuadDouble::to_f64(self)
    }

    fn abs(self) -> Self {
        QuadDouble::abs(self)
    }

    fn try_sqrt(self) -> Result<Self> {
        if self < Self::ZERO {
            Err(Error::NegativeSqrt)
        } else {
            Ok(self.sqrt_unchecked())
        }
    }

    fn parse_decimal(s: &str) -> Result<Self> {
        let c = decimal::parse_to_components::<4>(s)?;
        Ok(QuadDouble::renormalize([c[0], c[1], c[2], c[3], 0.0]))
    }

    fn to_decimal_string(self, ndigits: usize) -> String {
        decimal::format_components(&self.components(), ndigits)
    }

    fn to_decimal_string_exact(self) -> String {
        decimal::format_components_exact(&self.components())
    }

    fn is_finite(self) -> bool {
        QuadDouble::is_finite(self)
    }

    fn bit_eq(self, other: Self) -> bool {
        self.components()
            .iter()
            .zip(other.components().iter())
            .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// SplitMix64: the fixed pseudo-random generator behind every seeded input
/// in this crate. Documented so runs are reproducible across platforms.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Next double uniform in [-1, 1), driven by [`splitmix64`].
#[inline]
pub fn splitmix64_unit(state: &mut u64) -> f64 {
    let bits = splitmix64(state) >> 11; // 53 random bits
    let unit = bits as f64 * (1.0 / 9007199254740992.0); // [0, 1)
    2.0 * unit - 1.0
}
