//! Transparent operation-counting wrapper.
//!
//! `Counted<T>` performs exactly the arithmetic of `T` (bit-for-bit) while
//! tallying multiplications and additions/subtractions into process-wide
//! atomic counters. Counts are exact under any thread schedule; concurrent
//! *counting runs* are serialized by [`with_op_counts`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Mutex;

use num_traits::{One, Zero};

use super::Scalar;
use crate::error::Result;

static MUL_COUNT: AtomicU64 = AtomicU64::new(0);
static ADD_COUNT: AtomicU64 = AtomicU64::new(0);
static RUN_LOCK: Mutex<()> = Mutex::new(());

/// Tallies gathered by one counting run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Scalar multiplications.
    pub mul: u64,
    /// Scalar additions and subtractions.
    pub add: u64,
}

/// Runs `f` with the counters reset, returning its result and the tallies.
///
/// Holds a global lock for the duration so simultaneous counting runs
/// cannot bleed into each other; worker threads spawned inside `f` still
/// count concurrently through the atomics.
pub fn with_op_counts<R>(f: impl FnOnce() -> R) -> (R, OpCounts) {
    let _guard = RUN_LOCK.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    MUL_COUNT.store(0, AtomicOrdering::Relaxed);
    ADD_COUNT.store(0, AtomicOrdering::Relaxed);
    let result = f();
    let counts = OpCounts {
        mul: MUL_COUNT.load(AtomicOrdering::Relaxed),
        add: ADD_COUNT.load(AtomicOrdering::Relaxed),
    };
    (result, counts)
}

/// A scalar that counts its own multiplications and additions.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Counted<T>(pub T);

impl<T: Scalar> Add for Counted<T> {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        ADD_COUNT.fetch_add(1, AtomicOrdering::Relaxed);
        Counted(self.0 + rhs.0)
    }
}

impl<T: Scalar> Sub for Counted<T> {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        ADD_COUNT.fetch_add(1, AtomicOrdering::Relaxed);
        Counted(self.0 - rhs.0)
    }
}

impl<T: Scalar> Mul for Counted<T> {
    type Output = Self;

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        MUL_COUNT.fetch_add(1, AtomicOrdering::Relaxed);
        Counted(self.0 * rhs.0)
    }
}

impl<T: Scalar> Div for Counted<T> {
    type Output = Self;

    #[inline]
    fn div(self, rhs: Self) -> Self {
        Counted(self.0 / rhs.0)
    }
}

impl<T: Scalar> Neg for Counted<T> {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Counted(-self.0)
    }
}

impl<T: Scalar> AddAssign for Counted<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> SubAssign for Counted<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Scalar> MulAssign for Counted<T> {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<T: Scalar> Zero for Counted<T> {
    #[inline]
    fn zero() -> Self {
        Counted(T::zero())
    }

    #[inline]
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<T: Scalar> One for Counted<T> {
    #[inline]
    fn one() -> Self {
        Counted(T::one())
    }
}

impl<T: Scalar> fmt::Display for Counted<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl<T: Scalar> Scalar for Counted<T> {
    fn precision_label() -> &'static str {
        T::precision_label()
    }

    fn unit_roundoff() -> f64 {
        T::unit_roundoff()
    }

    fn roundtrip_digits() -> usize {
        T::roundtrip_digits()
    }

    fn from_f64(v: f64) -> Self {
        Counted(T::from_f64(v))
    }

    fn from_i128(v: i128) -> Self {
        Counted(T::from_i128(v))
    }

    fn to_f64(self) -> f64 {
        self.0.to_f64()
    }

    fn abs(self) -> Self {
        Counted(self.0.abs())
    }

    fn try_sqrt(self) -> Result<Self> {
        self.0.try_sqrt().map(Counted)
    }

    fn parse_decimal(s: &str) -> Result<Self> {
        T::parse_decimal(s).map(Counted)
    }

    fn to_decimal_string(self, ndigits: usize) -> String {
        self.0.to_decimal_string(ndigits)
    }

    fn to_decimal_string_exact(self) -> String {
        self.0.to_decimal_string_exact()
    }

    fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    fn bit_eq(self, other: Self) -> bool {
        self.0.bit_eq(other.0)
    }

    fn compare(self, other: Self) -> Ordering {
        self.0.compare(other.0)
    }
}
