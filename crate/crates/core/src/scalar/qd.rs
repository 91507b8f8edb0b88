//! Quad-double numbers: unevaluated sums of four machine doubles.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::eft::{quick_two_sum, three_sum, two_prod, two_sum};

/// A number stored as `c0 + c1 + c2 + c3` with components of decreasing
/// magnitude; after renormalization every adjacent pair is non-overlapping
/// (`fl(ci + ci+1) == ci`). Roughly 212 significand bits, unit roundoff
/// 2^-209.
///
/// Arithmetic keeps the relative error within `16 * QuadDouble::EPSILON`
/// of the exact result. The algorithms are the accurate (merge-based)
/// variants, so the bound survives cancellation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QuadDouble {
    c: [f64; 4],
}

impl QuadDouble {
    pub const ZERO: Self = Self { c: [0.0; 4] };
    pub const ONE: Self = Self { c: [1.0, 0.0, 0.0, 0.0] };

    /// Unit roundoff of the format: 2^-209.
    pub const EPSILON: f64 = 1.2154326714572542e-63;

    #[inline]
    pub fn components(self) -> [f64; 4] {
        self.c
    }

    #[inline]
    pub fn from_f64(v: f64) -> Self {
        Self { c: [v, 0.0, 0.0, 0.0] }
    }

    /// Exact conversion of an integer.
    pub fn from_i128(v: i128) -> Self {
        let c0 = v as f64;
        let r0 = v - c0 as i128;
        let c1 = r0 as f64;
        let r1 = r0 - c1 as i128;
        let c2 = r1 as f64;
        let r2 = r1 - c2 as i128;
        let c3 = r2 as f64;
        Self::renormalize([c0, c1, c2, c3, 0.0])
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        ((self.c[3] + self.c[2]) + self.c[1]) + self.c[0]
    }

    /// Restores the decreasing, non-overlapping component invariant from a
    /// five-term expansion (the natural intermediate of the arithmetic
    /// kernels), rounding to the quad-double format.
    ///
    /// The accumulation cascade uses the full two_sum so a mildly unsorted
    /// expansion (one displaced term) still renormalizes exactly.
    pub fn renormalize(c: [f64; 5]) -> Self {
        let [c0, c1, c2, c3, c4] = c;
        if !c0.is_finite() {
            return Self { c: [c0, c1, c2, c3] };
        }
        let (s, c4) = two_sum(c3, c4);
        let (s, c3) = two_sum(c2, s);
        let (s, c2) = two_sum(c1, s);
        let (c0, c1) = two_sum(c0, s);

        let (mut s0, mut s1) = quick_two_sum(c0, c1);
        let mut s2 = 0.0;
        let mut s3 = 0.0;
        if s1 != 0.0 {
            let (a, b) = quick_two_sum(s1, c2);
            s1 = a;
            s2 = b;
            if s2 != 0.0 {
                let (a, b) = quick_two_sum(s2, c3);
                s2 = a;
                s3 = b;
                if s3 != 0.0 {
                    s3 += c4;
                } else {
                    s2 += c4;
                }
            } else {
                let (a, b) = quick_two_sum(s1, c3);
                s1 = a;
                s2 = b;
                if s2 != 0.0 {
                    let (a, b) = quick_two_sum(s2, c4);
                    s2 = a;
                    s3 = b;
                } else {
                    let (a, b) = quick_two_sum(s1, c4);
                    s1 = a;
                    s2 = b;
                }
            }
        } else {
            let (a, b) = quick_two_sum(s0, c2);
            s0 = a;
            s1 = b;
            if s1 != 0.0 {
                let (a, b) = quick_two_sum(s1, c3);
                s1 = a;
                s2 = b;
                if s2 != 0.0 {
                    let (a, b) = quick_two_sum(s2, c4);
                    s2 = a;
                    s3 = b;
                } else {
                    let (a, b) = quick_two_sum(s1, c4);
                    s1 = a;
                    s2 = b;
                }
            } else {
                let (a, b) = quick_two_sum(s0, c3);
                s0 = a;
                s1 = b;
                if s1 != 0.0 {
                    let (a, b) = quick_two_sum(s1, c4);
                    s1 = a;
                    s2 = b;
                } else {
                    let (a, b) = quick_two_sum(s0, c4);
                    s0 = a;
                    s1 = b;
                }
            }
        }
        Self { c: [s0, s1, s2, s3] }
    }

    /// Four-term variant used by addition.
    fn renormalize4(c: [f64; 4]) -> Self {
        let [c0, c1, c2, c3] = c;
        if !c0.is_finite() {
            return Self { c };
        }
        let (s, c3) = two_sum(c2, c3);
        let (s, c2) = two_sum(c1, s);
        let (c0, c1) = two_sum(c0, s);

        let (mut s0, mut s1) = quick_two_sum(c0, c1);
        let mut s2 = 0.0;
        let mut s3 = 0.0;
        if s1 != 0.0 {
            let (a, b) = quick_two_sum(s1, c2);
            s1 = a;
            s2 = b;
            if s2 != 0.0 {
                let (a, b) = quick_two_sum(s2, c3);
                s2 = a;
                s3 = b;
            } else {
                let (a, b) = quick_two_sum(s1, c3);
                s1 = a;
                s2 = b;
            }
        } else {
            let (a, b) = quick_two_sum(s0, c2);
            s0 = a;
            s1 = b;
            if s1 != 0.0 {
                let (a, b) = quick_two_sum(s1, c3);
                s1 = a;
                s2 = b;
            } else {
                let (a, b) = quick_two_sum(s0, c3);
                s0 = a;
                s1 = b;
            }
        }
        Self { c: [s0, s1, s2, s3] }
    }

    /// True when adjacent components are non-overlapping and ordered.
    pub fn is_normalized(self) -> bool {
        for i in 0..3 {
            let hi = self.c[i];
            let lo = self.c[i + 1];
            if hi == 0.0 {
                if lo != 0.0 {
                    return false;
                }
                continue;
            }
            if hi + lo != hi {
                return false;
            }
        }
        true
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.c[0] < 0.0 || (self.c[0] == 0.0 && self.to_f64() < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Exact scaling by a power of two.
    #[inline]
    fn scale_pow2(self, f: f64) -> Self {
        Self { c: [self.c[0] * f, self.c[1] * f, self.c[2] * f, self.c[3] * f] }
    }

    /// Square root for non-negative inputs (callers check the sign).
    ///
    /// Newton iteration on `r ~ 1/sqrt(a)`: `r += r * (1/2 - a/2 * r^2)`,
    /// three rounds from a double-precision seed, then one final multiply.
    pub(crate) fn sqrt_unchecked(self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        let mut r = Self::from_f64(1.0 / self.c[0].sqrt());
        let h = self.scale_pow2(0.5);
        let half = Self::from_f64(0.5);
        for _ in 0..3 {
            r = r + (half - h * (r * r)) * r;
        }
        r * self
    }
}

/// Orders an operand pair by the bit patterns of the components. Addition
/// and multiplication run on the canonical order, which makes them bitwise
/// commutative (the kernels themselves are not order-insensitive at
/// magnitude ties).
#[inline]
fn canonical_pair(a: QuadDouble, b: QuadDouble) -> (QuadDouble, QuadDouble) {
    let key = |q: &QuadDouble| q.c.map(f64::to_bits);
    if key(&a) <= key(&b) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Merges one more term into the (a, b) accumulator pair; returns a finished
/// component or zero when the pair can still absorb more.
#[inline]
fn quick_three_accum(a: &mut f64, b: &mut f64, c: f64) -> f64 {
    let (s, nb) = two_sum(*b, c);
    let (s, na) = two_sum(*a, s);
    let za = na != 0.0;
    let zb = nb != 0.0;
    *a = na;
    *b = nb;
    if za && zb {
        return s;
    }
    if !zb {
        *b = *a;
        *a = s;
    } else {
        *a = s;
    }
    0.0
}

impl Add for QuadDouble {
    type Output = Self;

    /// Accurate addition: merge the eight components by decreasing
    /// magnitude, accumulate through a double-length carry pair.
    fn add(self, rhs: Self) -> Self {
        let (lhs, rhs) = canonical_pair(self, rhs);
        let a = lhs.c;
        let b = rhs.c;
        let mut i = 0;
        let mut j = 0;
        let mut x = [0.0f64; 4];

        let mut u = if a[i].abs() > b[j].abs() {
            let t = a[i];
            i += 1;
            t
        } else {
            let t = b[j];
            j += 1;
            t
        };
        let mut v = if a[i].abs() > b[j].abs() {
            let t = a[i];
            i += 1;
            t
        } else {
            let t = b[j];
            j += 1;
            t
        };
        let (s, e) = quick_two_sum(u, v);
        u = s;
        v = e;

        let mut k = 0;
        while k < 4 {
            if i >= 4 && j >= 4 {
                x[k] = u;
                if k < 3 {
                    x[k + 1] = v;
                }
                break;
            }
            let t = if i >= 4 {
                let t = b[j];
                j += 1;
                t
            } else if j >= 4 || a[i].abs() > b[j].abs() {
                let t = a[i];
                i += 1;
                t
            } else {
                let t = b[j];
                j += 1;
                t
            };
            let s = quick_three_accum(&mut u, &mut v, t);
            if s != 0.0 {
                x[k] = s;
                k += 1;
            }
        }
        for idx in i..4 {
            x[3] += a[idx];
        }
        for idx in j..4 {
            x[3] += b[idx];
        }
        Self::renormalize4(x)
    }
}

impl Sub for QuadDouble {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for QuadDouble {
    type Output = Self;

    /// Accurate multiplication: all partial products down to order eps^3
    /// through exact transformations, order-eps^4 terms folded in directly.
    fn mul(self, rhs: Self) -> Self {
        let (lhs, rhs) = canonical_pair(self, rhs);
        let a = lhs.c;
        let b = rhs.c;

        let (p0, mut q0) = two_prod(a[0], b[0]);
        let (mut p1, mut q1) = two_prod(a[0], b[1]);
        let (mut p2, mut q2) = two_prod(a[1], b[0]);
        let (mut p3, q3) = two_prod(a[0], b[2]);
        let (mut p4, q4) = two_prod(a[1], b[1]);
        let (mut p5, q5) = two_prod(a[2], b[0]);

        three_sum(&mut p1, &mut p2, &mut q0);

        // six-three sum of (p2, q1, q2) and (p3, p4, p5)
        three_sum(&mut p2, &mut q1, &mut q2);
        three_sum(&mut p3, &mut p4, &mut p5);
        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let mut s2 = q2 + p5;
        let (s1, t0) = two_sum(s1, t0);
        s2 += t0 + t1;

        // order eps^3 partial products
        let (p6, q6) = two_prod(a[0], b[3]);
        let (p7, q7) = two_prod(a[1], b[2]);
        let (p8, q8) = two_prod(a[2], b[1]);
        let (p9, q9) = two_prod(a[3], b[0]);

        // nine-two sum of q0, s1, q3, q4, q5, p6..p9
        let (q0, q3) = two_sum(q0, q3);
        let (q4, q5) = two_sum(q4, q5);
        let (p6, p7) = two_sum(p6, p7);
        let (p8, p9) = two_sum(p8, p9);
        let (t0, t1) = two_sum(q0, q4);
        let t1 = t1 + (q3 + q5);
        let (r0, r1) = two_sum(p6, p8);
        let r1 = r1 + (p7 + p9);
        let (q3, q4) = two_sum(t0, r0);
        let q4 = q4 + (t1 + r1);
        let (t0, t1) = two_sum(q3, s1);
        let t1 = t1 + q4;

        // order eps^4 terms
        let t1 = t1
            + a[1] * b[3]
            + a[2] * b[2]
            + a[3] * b[1]
            + q6
            + q7
            + q8
            + q9
            + s2;

        Self::renormalize([p0, p1, s0, t0, t1])
    }
}

impl Div for QuadDouble {
    type Output = Self;

    /// Long division: five quotient terms peeled off with full remainder
    /// updates. Division by zero yields infinities.
    fn div(self, rhs: Self) -> Self {
        let q0 = self.c[0] / rhs.c[0];
        let mut r = self - rhs * Self::from_f64(q0);
        let q1 = r.c[0] / rhs.c[0];
        r = r - rhs * Self::from_f64(q1);
        let q2 = r.c[0] / rhs.c[0];
        r = r - rhs * Self::from_f64(q2);
        let q3 = r.c[0] / rhs.c[0];
        r = r - rhs * Self::from_f64(q3);
        let q4 = r.c[0] / rhs.c[0];
        Self::renormalize([q0, q1, q2, q3, q4])
    }
}

impl Neg for QuadDouble {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self { c: [-self.c[0], -self.c[1], -self.c[2], -self.c[3]] }
    }
}

impl AddAssign for QuadDouble {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for QuadDouble {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for QuadDouble {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Zero for QuadDouble {
    #[inline]
    fn zero() -> Self {
        Self::ZERO
    }

    #[inline]
    fn is_zero(&self) -> bool {
        self.c == [0.0; 4]
    }
}

impl One for QuadDouble {
    #[inline]
    fn one() -> Self {
        Self::ONE
    }
}

impl PartialOrd for QuadDouble {
    /// Lexicographic on components; correct for normalized values.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        for i in 0..4 {
            match self.c[i].partial_cmp(&other.c[i])? {
                Ordering::Equal => continue,
                ord => return Some(ord),
            }
        }
        Some(Ordering::Equal)
    }
}

impl fmt::Display for QuadDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::decimal::format_components(&self.c, 65))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_is_two_pow_minus_209() {
        assert_eq!(QuadDouble::EPSILON, 2f64.powi(-209));
    }

    #[test]
    fn renormalize_trivial_and_presorted() {
        let q = QuadDouble::renormalize([1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(q.components(), [1.0, 0.0, 0.0, 0.0]);
        let tiny = 2f64.powi(-60);
        let q = QuadDouble::renormalize([1.0, tiny, 0.0, 0.0, 0.0]);
        assert_eq!(q.components(), [1.0, tiny, 0.0, 0.0]);
    }

    #[test]
    fn renormalize_reorders_swapped_components() {
        let tiny = 2f64.powi(-60);
        let q = QuadDouble::renormalize([tiny, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(q.components(), [1.0, tiny, 0.0, 0.0]);
    }

    #[test]
    fn add_zero_is_identity() {
        let x = QuadDouble::ONE / QuadDouble::from_f64(7.0);
        assert_eq!(x + QuadDouble::ZERO, x);
        assert_eq!(QuadDouble::ZERO + x, x);
    }

    #[test]
    fn results_are_normalized() {
        let a = QuadDouble::ONE / QuadDouble::from_f64(7.0);
        let b = QuadDouble::from_f64(13.0) / QuadDouble::from_f64(3.0);
        for v in [a + b, a - b, a * b, a / b, b.sqrt_unchecked()] {
            assert!(v.is_normalized(), "{v:?}");
        }
    }

    #[test]
    fn exact_cancellation_gives_zero() {
        let a = QuadDouble::ONE / QuadDouble::from_f64(7.0);
        assert!((a - a).is_zero());
    }

    #[test]
    fn from_i128_is_exact() {
        let v = (1i128 << 100) + 987654321;
        let q = QuadDouble::from_i128(v);
        assert!(q.is_normalized());
        let back: i128 = q.components().iter().map(|&c| c as i128).sum();
        assert_eq!(back, v);
    }
}
