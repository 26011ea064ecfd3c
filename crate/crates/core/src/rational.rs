//! Exact rational helpers: parsing `p/q` literals and rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{HardyError, Result};

/// Parses an integer or `p/q` literal. Decimal literals are rejected so that
/// exactness is never lost silently.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |why: &str| HardyError::descriptor(s, why);
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    if num.contains(['.', 'e', 'E']) || den.contains(['.', 'e', 'E']) {
        return Err(bad(
            "decimal literal where an exact rational is expected (use p/q, or --float)",
        ));
    }
    let n: BigInt = num.parse().map_err(|_| bad("not an integer numerator"))?;
    let d: BigInt = den.parse().map_err(|_| bad("not an integer denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// Parses either a rational literal or a float, returning the float value.
pub fn parse_number(s: &str) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    if t.contains('/') {
        return parse_rational(t).map(|r| to_f64(&r));
    }
    t.parse::<f64>()
        .map_err(|_| HardyError::descriptor(t, "not a number"))
}

/// Always renders as `p/q`, integers included.
pub fn render(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `f64` value of a rational, robust for huge numerators and denominators.
pub fn to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    // Rescale to a quotient with ~64 significant bits, then apply the exponent.
    let n = r.numer().abs();
    let d = r.denom();
    let k = 64 - (n.bits() as i64 - d.bits() as i64);
    let q = if k >= 0 {
        (n << k as usize) / d
    } else {
        n / (d << (-k) as usize)
    };
    let mag = q.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi((-k).clamp(-2000, 2000) as i32);
    if r.is_negative() {
        -mag
    } else {
        mag
    }
}

pub fn from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `base^exp` for an integer exponent of either sign.
pub fn powi(base: &BigRational, exp: i64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = if exp < 0 { base.recip() } else { base.clone() };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}
