//! Accuracy and invariant tests for the double-double / quad-double
//! arithmetic, checked against exact rational oracles.

mod common;

use common::{ratio_of_f64, rel_err_vs_ratio, ToRatio};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use mpmat::{splitmix64, Counted, DoubleDouble, QuadDouble, Scalar};
use mpmat::scalar::with_op_counts;

const EPS_DD: f64 = 4.930380657631324e-32; // 2^-104
const EPS_QD: f64 = 1.2154326714572542e-63; // 2^-209

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn epsilon_constants_are_the_documented_powers_of_two() {
    assert_eq!(DoubleDouble::unit_roundoff(), EPS_DD);
    assert_eq!(QuadDouble::unit_roundoff(), EPS_QD);
    assert_eq!(f64::unit_roundoff(), 2f64.powi(-52));
    assert_eq!(DoubleDouble::epsilon().to_f64(), EPS_DD);
}

#[test]
fn dd_third_times_three_is_one_within_4_eps() {
    let third = DoubleDouble::ONE / DoubleDouble::from_f64(3.0);
    // the quotient itself is correctly rounded to ~the format precision
    assert!(rel_err_vs_ratio(third, &ratio(1, 3)) <= 2.0 * EPS_DD);
    let prod = third * DoubleDouble::from_f64(3.0);
    assert!(rel_err_vs_ratio(prod, &BigRational::one()) <= 4.0 * EPS_DD);
}

#[test]
fn dd_sqrt_five_squared_is_five_within_8_eps() {
    let sqrt5 = DoubleDouble::from_i64(5).try_sqrt().unwrap();
    let sq = sqrt5 * sqrt5;
    assert!(rel_err_vs_ratio(sq, &ratio(5, 1)) <= 8.0 * EPS_DD);
}

#[test]
fn qd_seventh_times_seven_is_one_within_16_eps() {
    let seventh = QuadDouble::ONE / QuadDouble::from_f64(7.0);
    assert!(rel_err_vs_ratio(seventh, &ratio(1, 7)) <= 4.0 * EPS_QD);
    let prod = seventh * QuadDouble::from_f64(7.0);
    assert!(rel_err_vs_ratio(prod, &BigRational::one()) <= 16.0 * EPS_QD);
}

#[test]
fn qd_parsed_sqrt3_squares_to_three_within_16_eps() {
    // sqrt(3) to 70 digits
    let s = "1.732050807568877293527446341505872366942805253810380628055806979451933";
    let sqrt3 = QuadDouble::parse_decimal(s).unwrap();
    let sq = sqrt3 * sqrt3;
    assert!(rel_err_vs_ratio(sq, &ratio(3, 1)) <= 16.0 * EPS_QD);
}

#[test]
fn dd_division_accuracy_on_random_quotients() {
    let mut state = 0xd117;
    for _ in 0..2000 {
        let a = DoubleDouble::from_f64(unit(&mut state))
            + DoubleDouble::from_f64(unit(&mut state)) * DoubleDouble::epsilon();
        let b = DoubleDouble::from_f64(unit(&mut state));
        if b.to_f64().abs() < 1e-3 {
            continue;
        }
        let q = a / b;
        let exact = a.to_ratio() / b.to_ratio();
        assert!(rel_err_vs_ratio(q, &exact) <= 8.0 * EPS_DD, "a={a:?} b={b:?}");
    }
}

#[test]
fn qd_arithmetic_accuracy_on_random_values() {
    let mut state = 0x9d_9d_9d;
    for _ in 0..500 {
        let a = qd_random(&mut state);
        let b = qd_random(&mut state);
        let (ra, rb) = (a.to_ratio(), b.to_ratio());

        assert!(rel_err_vs_ratio(a + b, &(&ra + &rb)) <= 16.0 * EPS_QD || (&ra + &rb).is_zero());
        assert!(rel_err_vs_ratio(a * b, &(&ra * &rb)) <= 16.0 * EPS_QD || (&ra * &rb).is_zero());
        if rb.is_zero() {
            continue;
        }
        assert!(rel_err_vs_ratio(a / b, &(&ra / &rb)) <= 16.0 * EPS_QD);
    }
}

#[test]
fn addition_and_multiplication_commute_bitwise_on_random_values() {
    let mut state = 0xc0_ffee;
    for _ in 0..1000 {
        let a = dd_random(&mut state);
        let b = dd_random(&mut state);
        assert!((a + b).bit_eq(b + a));
        assert!((a * b).bit_eq(b * a));

        let qa = qd_random(&mut state);
        let qb = qd_random(&mut state);
        assert!((qa + qb).bit_eq(qb + qa));
        assert!((qa * qb).bit_eq(qb * qa));
    }
}

#[test]
fn decimal_round_trip_at_40_and_70_digits() {
    let mut state = 0x40_70;
    for _ in 0..300 {
        let x = dd_random(&mut state);
        let s = x.to_decimal_string(40);
        let back = DoubleDouble::parse_decimal(&s).unwrap();
        assert!(back.bit_eq(x), "dd {x:?} -> {s} -> {back:?}");

        let q = qd_random(&mut state);
        let s = q.to_decimal_string(70);
        let back = QuadDouble::parse_decimal(&s).unwrap();
        assert!(back.bit_eq(q), "qd {q:?} -> {s} -> {back:?}");
    }
}

#[test]
fn exact_decimal_round_trips_every_shape() {
    // values with zero low components round-trip through the exact format
    let mut state = 0xe_ac_7;
    for _ in 0..300 {
        let plain = DoubleDouble::from_f64(unit(&mut state));
        let s = plain.to_decimal_string_exact();
        assert!(DoubleDouble::parse_decimal(&s).unwrap().bit_eq(plain), "{s}");

        let rich = dd_random(&mut state);
        let s = rich.to_decimal_string_exact();
        assert!(DoubleDouble::parse_decimal(&s).unwrap().bit_eq(rich), "{s}");

        let q = qd_random(&mut state);
        let s = q.to_decimal_string_exact();
        assert!(QuadDouble::parse_decimal(&s).unwrap().bit_eq(q), "{s}");
    }
}

#[test]
fn from_integer_embeds_exactly() {
    let v: i64 = -123456789012345678;
    let dd = DoubleDouble::from_i64(v);
    assert_eq!(dd.to_ratio(), BigRational::from_integer(BigInt::from(v)));
    let qd = QuadDouble::from_i64(v);
    assert_eq!(qd.to_ratio(), BigRational::from_integer(BigInt::from(v)));
}

#[test]
fn domain_errors_are_reported() {
    assert!(DoubleDouble::from_f64(-2.0).try_sqrt().is_err());
    assert!(QuadDouble::from_f64(-2.0).try_sqrt().is_err());
    assert!(DoubleDouble::ONE.try_div(DoubleDouble::ZERO).is_err());
    assert!(QuadDouble::ONE.try_div(QuadDouble::ZERO).is_err());
    assert!(DoubleDouble::ONE.try_div(DoubleDouble::from_f64(2.0)).is_ok());
}

#[test]
fn counting_is_transparent_and_exact() {
    let mut state = 0xc047;
    let a = dd_random(&mut state);
    let b = dd_random(&mut state);
    let c = dd_random(&mut state);
    let raw = a * b + c - a;

    let (counted, counts) = with_op_counts(|| {
        let (a, b, c) = (Counted(a), Counted(b), Counted(c));
        a * b + c - a
    });
    assert!(counted.0.bit_eq(raw), "wrapping must not change results");
    assert_eq!(counts.mul, 1);
    assert_eq!(counts.add, 2, "subtraction tallies into the addition counter");
}

#[test]
fn zero_and_one_are_identities() {
    let mut state = 0x1d_e9;
    for _ in 0..200 {
        let x = dd_random(&mut state);
        assert_eq!(x + DoubleDouble::ZERO, x);
        assert_eq!(x * DoubleDouble::ONE, x);
        let q = qd_random(&mut state);
        assert_eq!(q + QuadDouble::ZERO, q);
        assert_eq!(q * QuadDouble::ONE, q);
    }
}

// -- random value builders -------------------------------------------------

fn unit(state: &mut u64) -> f64 {
    let bits = splitmix64(state) >> 11;
    2.0 * (bits as f64 * (1.0 / 9007199254740992.0)) - 1.0
}

/// A full-precision double-double from a few arithmetic steps.
fn dd_random(state: &mut u64) -> DoubleDouble {
    let a = DoubleDouble::from_f64(unit(state));
    let b = DoubleDouble::from_f64(unit(state) + 2.0);
    let c = DoubleDouble::from_f64(unit(state) + 4.0);
    a / b * c
}

/// A full-precision quad-double from a few arithmetic steps.
fn qd_random(state: &mut u64) -> QuadDouble {
    let a = QuadDouble::from_f64(unit(state));
    let b = QuadDouble::from_f64(unit(state) + 2.0);
    let c = QuadDouble::from_f64(unit(state) + 4.0);
    a / b * c
}

// -- property tests ---------------------------------------------------------

fn bounded_f64() -> impl Strategy<Value = f64> {
    // finite, exponent range wide enough to exercise alignment paths but
    // clear of overflow/underflow
    (any::<i64>(), -200i32..200).prop_map(|(m, e)| {
        let frac = (m as f64) / (i64::MAX as f64);
        frac * 2f64.powi(e)
    })
}

proptest! {
    #[test]
    fn dd_results_stay_normalized(a in bounded_f64(), b in bounded_f64(), c in bounded_f64()) {
        let x = DoubleDouble::new(a, b * 1e-20);
        let y = DoubleDouble::from_f64(c);
        for v in [x + y, x - y, x * y] {
            prop_assert!(v.is_normalized(), "{v:?}");
        }
        if c != 0.0 {
            prop_assert!((x / y).is_normalized());
        }
        prop_assert!(x.abs().try_sqrt().unwrap().is_normalized());
    }

    #[test]
    fn qd_results_stay_normalized(a in bounded_f64(), b in bounded_f64()) {
        let x = QuadDouble::from_f64(a) / QuadDouble::from_f64(3.0);
        let y = QuadDouble::from_f64(b) / QuadDouble::from_f64(7.0);
        for v in [x + y, x - y, x * y] {
            prop_assert!(v.is_normalized(), "{v:?}");
        }
        prop_assert!(x.abs().try_sqrt().unwrap().is_normalized());
    }

    #[test]
    fn dd_add_matches_exact_sum_to_working_precision(a in bounded_f64(), b in bounded_f64()) {
        let x = DoubleDouble::from_f64(a);
        let y = DoubleDouble::from_f64(b);
        let exact = ratio_of_f64(a) + ratio_of_f64(b);
        let err = rel_err_vs_ratio(x + y, &exact);
        prop_assert!(exact.is_zero() || err <= 8.0 * EPS_DD, "err = {err:e}");
    }
}
