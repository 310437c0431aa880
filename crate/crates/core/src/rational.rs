//! Exact rational helpers: parsing `p/q` and decimal literals, and display.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for every stored probability.
pub type Q = BigRational;

/// Builds `n/d` from machine integers.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a decimal such as `0.15` or `1e-3` exactly.
pub fn parse_q(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::InvalidNumber(t.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(k) => (&t[..k], t[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut v = Q::from_integer(num);
    if scale >= 0 {
        v *= Q::from_integer(num::pow(ten, scale as usize));
    } else {
        v /= Q::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -v } else { v })
}

/// Parses a probability and checks it lies in `[0, 1]`.
pub fn parse_prob(text: &str) -> Result<Q> {
    let v = parse_q(text)?;
    if v.is_negative() || v > Q::one() {
        return Err(Error::InvalidNumber(text.trim().to_string()));
    }
    Ok(v)
}

/// Decimal rendering rounded half-up to `places` digits, trailing zeros
/// stripped but at least one fractional digit kept (`1` → `1.0`).
pub fn to_decimal(v: &Q, places: usize) -> String {
    let neg = v.is_negative();
    let a = v.abs();
    let scale = num::pow(BigInt::from(10), places);
    let scaled = a.numer() * &scale;
    let (mut quo, rem) = scaled.div_rem(a.denom());
    if rem * BigInt::from(2) >= *a.denom() {
        quo += 1;
    }
    let (ip, fp) = quo.div_rem(&scale);
    let mut frac = format!("{:0>width$}", fp.to_string(), width = places);
    while frac.len() > 1 && frac.ends_with('0') {
        frac.pop();
    }
    if frac.is_empty() {
        frac.push('0');
    }
    let sign = if neg && !(ip.is_zero() && frac.chars().all(|c| c == '0')) { "-" } else { "" };
    format!("{sign}{ip}.{frac}")
}

/// The canonical CLI rendering: exact value followed by a decimal, e.g. `187/216 (0.8657407407)`.
pub fn display(v: &Q) -> String {
    format!("{} ({})", v, to_decimal(v, 10))
}

/// Lossy conversion to `f64`.
pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions).
pub fn from_f64_bounded(x: f64, max_den: u64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let neg = x < 0.0;
    let mut r = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e18 {
            break;
        }
        let ai = a as u128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as u128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let f = r - a;
        if f < 1e-15 {
            break;
        }
        r = 1.0 / f;
    }
    if q1 == 0 {
        return Q::zero();
    }
    let v = Q::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -v
    } else {
        v
    }
}

/// Exact conversion of a finite `f64` (every double is a dyadic rational).
pub fn from_f64_exact(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

/// Whether `v` lies in `[0, 1]`.
pub fn is_prob(v: &Q) -> bool {
    !v.is_negative() && *v <= Q::one()
}
