//! Exact-arithmetic oracles shared by the integration tests.
//!
//! Everything here is written independently of the library's numeric paths:
//! rational values are built straight from component bit patterns and all
//! reference computations (products, inverses, condition numbers) run in
//! exact arithmetic. These are the "second route" the floating kernels are
//! checked against, so none of it may call into the code it verifies.

#![allow(dead_code)] // each test binary uses its own subset

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use mpmat::{DenseMatrix, DoubleDouble, QuadDouble, Scalar};

/// Exact decomposition of a finite double: `x == mantissa * 2^exponent`.
pub fn decompose(x: f64) -> (i64, i32) {
    assert!(x.is_finite());
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (m, e) = if biased == 0 {
        (frac, -1074) // subnormal
    } else {
        (frac | (1i64 << 52), biased - 1075)
    };
    (sign * m, e)
}

/// Exact rational of a finite double, built from its bit pattern.
pub fn ratio_of_f64(x: f64) -> BigRational {
    let (m, e) = decompose(x);
    let m = BigInt::from(m);
    if e >= 0 {
        BigRational::from_integer(m << e as u32)
    } else {
        BigRational::new(m, BigInt::from(1) << (-e) as u32)
    }
}

/// Exact rational of a component sum.
pub fn ratio_of_components(comps: &[f64]) -> BigRational {
    comps.iter().map(|&c| ratio_of_f64(c)).fold(BigRational::zero(), |acc, r| acc + r)
}

/// Scalars that expose their exact rational value to the oracle.
pub trait ToRatio: Scalar {
    fn to_ratio(self) -> BigRational;
}

impl ToRatio for f64 {
    fn to_ratio(self) -> BigRational {
        ratio_of_f64(self)
    }
}

impl ToRatio for DoubleDouble {
    fn to_ratio(self) -> BigRational {
        ratio_of_components(&[self.hi(), self.lo()])
    }
}

impl ToRatio for QuadDouble {
    fn to_ratio(self) -> BigRational {
        ratio_of_components(&self.components())
    }
}

/// Nearest-double approximation of a rational, good to about one ulp; used
/// only to compare error magnitudes against tolerances.
pub fn ratio_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let neg = x.is_negative();
    let p = x.numer().magnitude();
    let q = x.denom().magnitude();
    let shift = 64 - (p.bits() as i64 - q.bits() as i64);
    let (num, den) = if shift >= 0 {
        (p << shift as u64, q.clone())
    } else {
        (p.clone(), q << (-shift) as u64)
    };
    let quo = num / den;
    let v = quo.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-shift as i32);
    if neg {
        -v
    } else {
        v
    }
}

/// |computed - exact| / |exact| as a double; exact zero reference demands an
/// exactly zero computed value.
pub fn rel_err_vs_ratio<T: ToRatio>(computed: T, exact: &BigRational) -> f64 {
    let c = computed.to_ratio();
    if exact.is_zero() {
        return if c.is_zero() { 0.0 } else { f64::INFINITY };
    }
    let err = (c - exact).abs() / exact.abs();
    ratio_to_f64(&err)
}

pub type RatioMatrix = Vec<Vec<BigRational>>;

pub fn ratio_matrix<T: ToRatio>(m: &DenseMatrix<T>) -> RatioMatrix {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_ratio()).collect()).collect()
}

/// Exact product, plain triple loop.
pub fn ratio_matmul(a: &RatioMatrix, b: &RatioMatrix) -> RatioMatrix {
    let m = a.len();
    let l = b.len();
    let n = b[0].len();
    let mut c = vec![vec![BigRational::zero(); n]; m];
    for i in 0..m {
        for (k, brow) in b.iter().enumerate().take(l) {
            let aik = &a[i][k];
            for j in 0..n {
                let t = aik * &brow[j];
                c[i][j] += t;
            }
        }
    }
    c
}

/// Exact matrix-vector product.
pub fn ratio_matvec(a: &RatioMatrix, x: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).fold(BigRational::zero(), |s, t| s + t))
        .collect()
}

/// Exact inverse by Gauss-Jordan with partial pivoting (pivot choice is
/// irrelevant in exact arithmetic); None for singular input.
pub fn ratio_inverse(a: &RatioMatrix) -> Option<RatioMatrix> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { BigRational::from_integer(1.into()) } else { BigRational::zero() });
            }
            r
        })
        .collect();
    for c in 0..n {
        let pivot_row = (c..n).max_by(|&x, &y| aug[x][c].abs().cmp(&aug[y][c].abs()))?;
        if aug[pivot_row][c].is_zero() {
            return None;
        }
        aug.swap(c, pivot_row);
        let pivot = aug[c][c].clone();
        for v in aug[c].iter_mut() {
            *v /= pivot.clone();
        }
        for r in 0..n {
            if r != c && !aug[r][c].is_zero() {
                let factor = aug[r][c].clone();
                for j in 0..2 * n {
                    let t = &factor * &aug[c][j];
                    aug[r][j] -= t;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Maximum absolute column sum, exact.
pub fn ratio_norm_1(a: &RatioMatrix) -> BigRational {
    let n = a[0].len();
    let mut best = BigRational::zero();
    for j in 0..n {
        let mut sum = BigRational::zero();
        for row in a {
            sum += row[j].abs();
        }
        if sum > best {
            best = sum;
        }
    }
    best
}

/// Exact `norm_1(A) * norm_1(A^-1)`; panics on singular input.
pub fn ratio_cond_1(a: &RatioMatrix) -> BigRational {
    let inv = ratio_inverse(a).expect("nonsingular oracle input");
    ratio_norm_1(a) * ratio_norm_1(&inv)
}

/// The Lotkin matrix in exact rationals (1-based formula `1/(i+j-1)`).
pub fn ratio_lotkin(n: usize) -> RatioMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == 0 {
                        BigRational::from_integer(1.into())
                    } else {
                        BigRational::new(BigInt::from(1), BigInt::from((i + j + 1) as i64))
                    }
                })
                .collect()
        })
        .collect()
}

/// Componentwise scale for product-error bounds: `(|A| * |B|)_ij`, the
/// standard envelope `|C_computed - C|_ij <= c_n * eps * (|A||B|)_ij` is
/// measured against. Entrywise positive inputs make the triple loop exact
/// enough for a denominator.
pub fn product_scale<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let absa = a.map(|x| x.abs());
    let absb = b.map(|x| x.abs());
    mpmat::matmul_simple(&absa, &absb).expect("conforming dimensions")
}

/// Worst `|x_ij - r_ij| / scale_ij`; a zero scale entry (a fully zero row
/// meeting a zero column) demands an exactly zero difference.
pub fn max_scaled_componentwise_err<T: Scalar>(
    x: &DenseMatrix<T>,
    r: &DenseMatrix<T>,
    scale: &DenseMatrix<T>,
) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            let d = (x.get(i, j) - r.get(i, j)).abs().to_f64();
            let s = scale.get(i, j).to_f64();
            if s > 0.0 {
                worst = worst.max(d / s);
            } else {
                assert_eq!(d, 0.0, "zero-scale element must agree exactly");
            }
        }
    }
    worst
}

/// Componentwise relative-error maximum against an exact reference, with
/// the same zero-reference fallback as the library metric.
pub fn max_rel_err_vs_ratio<T: ToRatio>(x: &DenseMatrix<T>, exact: &RatioMatrix) -> f64 {
    let mut ref_inf = BigRational::zero();
    for row in exact {
        for v in row {
            let a = v.abs();
            if a > ref_inf {
                ref_inf = a;
            }
        }
    }
    assert!(!ref_inf.is_zero(), "oracle reference must be nonzero");
    let mut worst = BigRational::zero();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            let r = &exact[i][j];
            let denom = if r.is_zero() { ref_inf.clone() } else { r.abs() };
            let e = (x.get(i, j).to_ratio() - r).abs() / denom;
            if e > worst {
                worst = e;
            }
        }
    }
    ratio_to_f64(&worst)
}
