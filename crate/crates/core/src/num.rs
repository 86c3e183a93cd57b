//! Exact rationals and norm values.
//!
//! Norms of the spaces handled here are either rational, square roots of
//! rationals (the `ℓ²`-sums of the Schreier plegmatic norm) or, for the
//! implicit Tsirelson-type norm, floating point values with an error bound.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"3"`, `"-1/2"` or a finite decimal such as `"0.25"`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut r = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    if shift >= 0 {
        r *= Rational::from_integer(ten.pow(shift as u32));
    } else {
        r /= Rational::from_integer(ten.pow((-shift) as u32));
    }
    Ok(if neg { -r } else { r })
}

/// Reads a JSON number or string as an exact rational. JSON floats are read
/// through their decimal text, so `0.1` means one tenth.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        _ => Err(Error::InvalidInput(format!("expected a number, got {v}"))),
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact square root when `r` is the square of a rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn pow2_inv(n: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2).pow(n))
}

/// A computed norm value.
#[derive(Clone, Debug, PartialEq)]
pub enum NormValue {
    Exact(Rational),
    /// `sqrt(r)`, kept symbolic.
    Sqrt(Rational),
    /// Floating value; the true value lies in `[value - error, value + error]`
    /// unless stated otherwise by the producing engine.
    Approx { value: f64, error: f64 },
}

impl NormValue {
    pub fn zero() -> Self {
        NormValue::Exact(Rational::zero())
    }

    /// Collapses `sqrt(q²)` to `q`.
    pub fn sqrt_of(r: Rational) -> Self {
        match rational_sqrt(&r) {
            Some(q) => NormValue::Exact(q),
            None => NormValue::Sqrt(r),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Exact(r) => to_f64(r),
            NormValue::Sqrt(r) => to_f64(r).sqrt(),
            NormValue::Approx { value, .. } => *value,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, NormValue::Approx { .. })
    }

    pub fn squared(&self) -> Option<Rational> {
        match self {
            NormValue::Exact(r) => Some(r * r),
            NormValue::Sqrt(r) => Some(r.clone()),
            NormValue::Approx { .. } => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            NormValue::Exact(r) => Some(r.clone()),
            NormValue::Sqrt(r) => rational_sqrt(r),
            NormValue::Approx { .. } => None,
        }
    }

    /// Exact comparison of two exact values (both are nonnegative).
    pub fn exact_cmp(&self, other: &NormValue) -> Option<Ordering> {
        Some(self.squared()?.cmp(&other.squared()?))
    }

    /// Exact when possible, otherwise by floating value.
    pub fn cmp_value(&self, other: &NormValue) -> Ordering {
        self.exact_cmp(other).unwrap_or_else(|| {
            self.to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal)
        })
    }

    /// `self < r` for a rational bound, exact when possible.
    pub fn lt_rational(&self, r: &Rational) -> bool {
        if r.is_negative() {
            return false;
        }
        match self.squared() {
            Some(sq) => sq < r * r,
            None => self.to_f64() < to_f64(r),
        }
    }

    pub fn le_rational(&self, r: &Rational) -> bool {
        if r.is_negative() {
            return false;
        }
        match self.squared() {
            Some(sq) => sq <= r * r,
            None => self.to_f64() <= to_f64(r),
        }
    }

    pub fn scale(&self, c: &Rational) -> NormValue {
        let c = c.abs();
        match self {
            NormValue::Exact(r) => NormValue::Exact(r * &c),
            NormValue::Sqrt(r) => NormValue::sqrt_of(r * &c * &c),
            NormValue::Approx { value, error } => {
                let f = to_f64(&c);
                NormValue::Approx { value: value * f, error: error * f }
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            NormValue::Exact(r) => json!({"kind": "exact", "exact": fmt_rational(r), "value": to_f64(r)}),
            NormValue::Sqrt(r) => json!({"kind": "sqrt", "radicand": fmt_rational(r), "value": self.to_f64()}),
            NormValue::Approx { value, error } => json!({"kind": "approx", "value": value, "error": error}),
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            NormValue::Exact(r) => write!(f, "{} ({:.12})", fmt_rational(r), to_f64(r)),
            NormValue::Sqrt(r) => write!(f, "sqrt({}) ({:.12})", fmt_rational(r), self.to_f64()),
            NormValue::Approx { value, error } => write!(f, "{value:.12} ± {error:.3e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("1e-2").unwrap(), rat(1, 100));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn sqrt_collapses_squares() {
        assert_eq!(NormValue::sqrt_of(rat(9, 4)), NormValue::Exact(rat(3, 2)));
        assert_eq!(NormValue::sqrt_of(int(2)), NormValue::Sqrt(int(2)));
        assert_eq!(
            NormValue::Sqrt(int(2)).exact_cmp(&NormValue::Exact(rat(3, 2))),
            Some(Ordering::Less)
        );
    }
}
