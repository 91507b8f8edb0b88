//! Error-free transformations on machine doubles.
//!
//! Every function here returns a rounded result together with its exact
//! rounding error, so `sum == a + b` and `prod == a * b` hold as statements
//! about real numbers, not floating-point ones. These are the primitives the
//! double-double and quad-double types are assembled from.
//!
//! Overflow and underflow propagate (infinities and NaNs are not trapped);
//! callers keep operands inside the double range.

/// Splitting constant for Dekker's product: 2^27 + 1.
const SPLIT: f64 = 134217729.0;

/// Sum `s = fl(a + b)` and exact error `e` with `a + b == s + e`.
///
/// Knuth's branch-free six-operation version; no magnitude ordering required.
#[inline(always)]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Like [`two_sum`] but requires `|a| >= |b|` (or `a == 0`); three operations.
#[inline(always)]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Product `p = fl(a * b)` and exact error `e` with `a * b == p + e`.
#[inline(always)]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    #[cfg(target_feature = "fma")]
    {
        (p, f64::mul_add(a, b, -p))
    }
    #[cfg(not(target_feature = "fma"))]
    {
        let (ahi, alo) = split(a);
        let (bhi, blo) = split(b);
        let e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
        (p, e)
    }
}

/// Dekker's splitting of `a` into high and low 26-bit halves.
#[cfg(not(target_feature = "fma"))]
#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    let t = SPLIT * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[cfg(target_feature = "fma")]
#[allow(dead_code)]
const _: f64 = SPLIT;

/// Exact sum of three doubles redistributed into three components.
#[inline(always)]
pub(crate) fn three_sum(a: &mut f64, b: &mut f64, c: &mut f64) {
    let (t1, t2) = two_sum(*a, *b);
    let (na, t3) = two_sum(*c, t1);
    let (nb, nc) = two_sum(t2, t3);
    *a = na;
    *b = nb;
    *c = nc;
}

/// Asserts that the FPU rounds to nearest, ties to even.
///
/// All accuracy contracts in this crate assume the IEEE 754 default rounding
/// mode; this probe fails loudly if the process has switched modes.
pub fn assert_round_to_nearest() {
    let one = std::hint::black_box(1.0f64);
    let half_ulp = std::hint::black_box(f64::EPSILON / 2.0);
    assert_eq!(one + half_ulp, 1.0, "rounding mode is not round-to-nearest-even");
    let big = std::hint::black_box(9007199254740992.0f64); // 2^53
    assert_eq!(big + 1.0, big, "rounding mode is not round-to-nearest-even");
    assert_eq!(big + 3.0, big + 4.0, "rounding mode is not round-to-nearest-even");
}
