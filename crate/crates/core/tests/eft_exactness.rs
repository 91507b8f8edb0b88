//! Exactness of the error-free transformations, checked against exact
//! integer/rational arithmetic over large random samples.

mod common;

use common::{decompose, ratio_of_f64};
use num_bigint::BigInt;
use mpmat::scalar::eft::{two_prod, two_sum};
use mpmat::splitmix64;

/// Random double `u * 2^k` with u uniform in [-1, 1) and k in [0, 20].
fn random_scaled(state: &mut u64) -> f64 {
    let u = {
        let bits = splitmix64(state) >> 11;
        2.0 * (bits as f64 * (1.0 / 9007199254740992.0)) - 1.0
    };
    let k = (splitmix64(state) % 21) as i32;
    u * 2f64.powi(k)
}

/// `a + b == s + e` as exact integers over a common power-of-two quantum.
fn sum_is_exact(a: f64, b: f64, s: f64, e: f64) -> bool {
    let parts = [a, b, s, e].map(decompose);
    let base = parts.iter().map(|&(_, ex)| ex).min().unwrap();
    let term = |(m, ex): (i64, i32)| BigInt::from(m) << (ex - base) as u32;
    term(parts[0]) + term(parts[1]) == term(parts[2]) + term(parts[3])
}

/// `a * b == p + e` as exact integers.
fn prod_is_exact(a: f64, b: f64, p: f64, e: f64) -> bool {
    let (ma, ea) = decompose(a);
    let (mb, eb) = decompose(b);
    let (mp, ep) = decompose(p);
    let (me, ee) = decompose(e);
    let base = (ea + eb).min(ep).min(ee);
    let lhs = (BigInt::from(ma) * BigInt::from(mb)) << ((ea + eb) - base) as u32;
    let rhs = (BigInt::from(mp) << (ep - base) as u32) + (BigInt::from(me) << (ee - base) as u32);
    lhs == rhs
}

#[test]
fn two_sum_is_exact_on_a_million_pairs() {
    let mut state = 0x5eed_0001;
    for _ in 0..1_000_000 {
        let a = random_scaled(&mut state);
        let b = random_scaled(&mut state);
        let (s, e) = two_sum(a, b);
        assert_eq!(s, a + b, "sum part must be the rounded sum");
        assert!(sum_is_exact(a, b, s, e), "residual not exact for ({a:e}, {b:e})");
    }
}

#[test]
fn two_prod_is_exact_on_a_million_pairs() {
    let mut state = 0x5eed_0002;
    for _ in 0..1_000_000 {
        let a = random_scaled(&mut state);
        let b = random_scaled(&mut state);
        let (p, e) = two_prod(a, b);
        assert_eq!(p, a * b, "product part must be the rounded product");
        assert!(prod_is_exact(a, b, p, e), "residual not exact for ({a:e}, {b:e})");
    }
}

#[test]
fn eft_exactness_holds_across_wide_exponent_ranges() {
    // rational-arithmetic oracle on pairs spanning ~600 binades
    let mut state = 0x5eed_0003;
    for _ in 0..10_000 {
        let wild = |st: &mut u64| {
            let u = {
                let bits = splitmix64(st) >> 11;
                2.0 * (bits as f64 * (1.0 / 9007199254740992.0)) - 1.0
            };
            let k = (splitmix64(st) % 601) as i32 - 300;
            u * 2f64.powi(k)
        };
        let a = wild(&mut state);
        let b = wild(&mut state);

        let (s, e) = two_sum(a, b);
        let exact = ratio_of_f64(a) + ratio_of_f64(b);
        assert_eq!(ratio_of_f64(s) + ratio_of_f64(e), exact, "two_sum ({a:e}, {b:e})");

        let (p, pe) = two_prod(a, b);
        if p.is_finite() && p.abs() > 1e-290 {
            // keep clear of underflow, where two_prod residuals are not exact
            let exact = ratio_of_f64(a) * ratio_of_f64(b);
            assert_eq!(ratio_of_f64(p) + ratio_of_f64(pe), exact, "two_prod ({a:e}, {b:e})");
        }
    }
}
