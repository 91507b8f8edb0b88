//! Exact decimal conversion for multi-component floats.
//!
//! Parsing goes decimal literal -> exact rational -> correctly rounded
//! components, and printing goes exact rational -> rounded decimal digits,
//! so a value printed with enough digits parses back bit-for-bit. Speed is
//! irrelevant here; these paths only run for I/O.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational value of a finite double.
pub(crate) fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite double")
}

/// Exact rational value of a component sum.
pub(crate) fn components_to_rational(comps: &[f64]) -> BigRational {
    comps
        .iter()
        .map(|&c| f64_to_rational(c))
        .fold(BigRational::zero(), |acc, r| acc + r)
}

fn pow10(k: u64) -> BigUint {
    BigUint::from(10u32).pow(k as u32)
}

/// Integer quotient of `num / den` rounded to nearest, ties to even.
fn div_round_half_even(num: &BigUint, den: &BigUint) -> BigUint {
    use num_integer::Integer;
    let (mut q, r) = num.div_rem(den);
    let twice: BigUint = &r << 1u32;
    match twice.cmp(den) {
        std::cmp::Ordering::Greater => q += 1u32,
        std::cmp::Ordering::Equal => {
            if q.bit(0) {
                q += 1u32;
            }
        }
        std::cmp::Ordering::Less => {}
    }
    q
}

/// Rounds an exact rational to the nearest double (ties to even), with
/// correct subnormal and overflow behavior.
pub(crate) fn rational_round_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let neg = x.is_negative();
    let p = x.numer().magnitude().clone();
    let q = x.denom().magnitude().clone();

    // 2^(e-1) <= p/q < 2^(e+1); refine below.
    let mut e = p.bits() as i64 - q.bits() as i64;
    let m = loop {
        let e_eff = e.max(-1022);
        let shift = 52 - e_eff;
        let (num, den) = if shift >= 0 {
            (&p << shift as u64, q.clone())
        } else {
            (p.clone(), &q << (-shift) as u64)
        };
        let m = div_round_half_even(&num, &den);
        let bits = m.bits() as i64;
        if bits > 53 {
            e += 1;
            continue;
        }
        if bits == 53 || e_eff <= -1022 {
            e = e_eff;
            break m;
        }
        e -= 1;
    };

    if e > 1023 {
        return if neg { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let m = m.to_u64().expect("53-bit mantissa");
    let bits = if m >= (1u64 << 52) {
        let biased = (e + 1023) as u64;
        (biased << 52) | (m & ((1u64 << 52) - 1))
    } else {
        // subnormal: e == -1022, value is m * 2^-1074
        m
    };
    let sign = if neg { 1u64 << 63 } else { 0 };
    f64::from_bits(bits | sign)
}

/// Correctly rounded leading components of an exact rational: component i
/// is the nearest double to the remainder after components 0..i.
pub(crate) fn rational_to_components<const N: usize>(x: &BigRational) -> [f64; N] {
    let mut out = [0.0; N];
    let mut rem = x.clone();
    for slot in out.iter_mut() {
        let c = rational_round_to_f64(&rem);
        *slot = c;
        if c == 0.0 || !c.is_finite() {
            break;
        }
        rem -= f64_to_rational(c);
    }
    out
}

/// Parses `[+-]digits[.digits][e[+-]digits]` into an exact rational.
pub(crate) fn parse_decimal_literal(s: &str) -> Result<BigRational> {
    let fail = |reason: &'static str| Error::InvalidDecimal { literal: s.to_string(), reason };

    let bytes = s.as_bytes();
    let mut pos = 0;
    let neg = match bytes.first() {
        Some(b'-') => {
            pos += 1;
            true
        }
        Some(b'+') => {
            pos += 1;
            false
        }
        _ => false,
    };

    let digits_start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == digits_start {
        return Err(fail("expected digits"));
    }
    let int_part = &s[digits_start..pos];

    let mut frac_part = "";
    if pos < bytes.len() && bytes[pos] == b'.' {
        pos += 1;
        let frac_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == frac_start {
            return Err(fail("expected digits after decimal point"));
        }
        frac_part = &s[frac_start..pos];
    }

    let mut exp10: i64 = 0;
    if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        pos += 1;
        let exp_str = &s[pos..];
        if exp_str.is_empty() {
            return Err(fail("expected exponent digits"));
        }
        exp10 = exp_str.parse::<i64>().map_err(|_| fail("invalid exponent"))?;
        pos = bytes.len();
    }
    if pos != bytes.len() {
        return Err(fail("trailing characters"));
    }

    let mantissa_str = format!("{int_part}{frac_part}");
    let mantissa: BigUint = mantissa_str.parse().map_err(|_| fail("invalid digits"))?;
    let net_exp = exp10 - frac_part.len() as i64;

    let sign = if neg { Sign::Minus } else { Sign::Plus };
    let m = BigInt::from_biguint(sign, mantissa);
    let value = if net_exp >= 0 {
        BigRational::from_integer(m * BigInt::from(pow10(net_exp as u64)))
    } else {
        BigRational::new(m, BigInt::from(pow10((-net_exp) as u64)))
    };
    Ok(value)
}

/// Formats a component sum as `[-]d.ddd...e<k>` with exactly `ndigits`
/// significant digits, correctly rounded.
pub(crate) fn format_components(comps: &[f64], ndigits: usize) -> String {
    assert!(ndigits >= 1);
    if comps.iter().any(|c| !c.is_finite()) {
        let v: f64 = comps.iter().sum();
        return format!("{v}");
    }
    let x = components_to_rational(comps);
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    let p = a.numer().magnitude();
    let q = a.denom().magnitude();

    // decimal exponent: 10^e10 <= a < 10^(e10+1)
    let mut e10 = ((p.bits() as i64 - q.bits() as i64) as f64 * std::f64::consts::LOG10_2).floor()
        as i64;
    let cmp_pow10 = |k: i64| -> std::cmp::Ordering {
        // compare a against 10^k
        if k >= 0 {
            p.cmp(&(q * pow10(k as u64)))
        } else {
            (p * pow10((-k) as u64)).cmp(q)
        }
    };
    while cmp_pow10(e10 + 1) != std::cmp::Ordering::Less {
        e10 += 1;
    }
    while cmp_pow10(e10) == std::cmp::Ordering::Less {
        e10 -= 1;
    }

    let scale = ndigits as i64 - 1 - e10;
    let (num, den) = if scale >= 0 {
        (p * pow10(scale as u64), q.clone())
    } else {
        (p.clone(), q * pow10((-scale) as u64))
    };
    let mut digits = div_round_half_even(&num, &den);
    if digits == pow10(ndigits as u64) {
        digits /= 10u32;
        e10 += 1;
    }
    let ds = digits.to_string();
    debug_assert_eq!(ds.len(), ndigits);

    let mut out = String::with_capacity(ndigits + 8);
    if neg {
        out.push('-');
    }
    out.push_str(&ds[..1]);
    if ndigits > 1 {
        out.push('.');
        out.push_str(&ds[1..]);
    }
    out.push('e');
    out.push_str(&e10.to_string());
    out
}

/// Parses a literal and rounds it to `N` components.
pub(crate) fn parse_to_components<const N: usize>(s: &str) -> Result<[f64; N]> {
    let r = parse_decimal_literal(s)?;
    Ok(rational_to_components::<N>(&r))
}

/// Formats a component sum as its exact (terminating) decimal expansion.
///
/// Every finite component sum is a dyadic rational `P / 2^k`, so
/// `P * 5^k * 10^-k` is exact; parsing the output reproduces the value
/// bit for bit. Used by the matrix text format.
pub(crate) fn format_components_exact(comps: &[f64]) -> String {
    if comps.iter().any(|c| !c.is_finite()) {
        let v: f64 = comps.iter().sum();
        return format!("{v}");
    }
    let x = components_to_rational(comps);
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let p = x.numer().magnitude().clone();
    let q = x.denom().magnitude();

    // q is a power of two for dyadic inputs
    let k = q.trailing_zeros().unwrap_or(0);
    debug_assert_eq!(&(BigUint::one() << k), q, "component sum must be dyadic");
    let digits = p * BigUint::from(5u32).pow(k as u32);
    let ds = digits.to_string();
    let e10 = ds.len() as i64 - 1 - k as i64;
    let trimmed = ds.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };

    let mut out = String::with_capacity(trimmed.len() + 8);
    if neg {
        out.push('-');
    }
    out.push_str(&trimmed[..1]);
    if trimmed.len() > 1 {
        out.push('.');
        out.push_str(&trimmed[1..]);
    }
    out.push('e');
    out.push_str(&e10.to_string());
    out
}
