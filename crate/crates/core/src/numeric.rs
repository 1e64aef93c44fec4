//! Exact rationals and the string forms used in instance files.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-0.25"`, `"1e-3"`, `"2.5E2"` or `"7/3"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::ParseRational(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| err())?);
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// `"n"` for integers, `"n/d"` otherwise. Inverse of [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// The decimal that prints as `x` (shortest round-trip form), made exact.
pub fn from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::ParseRational(x.to_string()));
    }
    parse_rational(&format!("{x}"))
}

/// Nearest multiple of `step` (ties round up).
pub fn snap(x: &Rational, step: &Rational) -> Rational {
    let q = x / step;
    let half = ratio(1, 2);
    (q + half).floor() * step
}

pub mod serde_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("expected rational, got {other}"))),
        };
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), int(250));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("2.3364").unwrap(), ratio(23364, 10000));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1.2.3", "--1", "e5", "1e"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn format_round_trips() {
        for r in [int(0), int(-7), ratio(22, 7), ratio(-1, 1000)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn from_f64_is_decimal() {
        assert_eq!(from_f64(0.001).unwrap(), ratio(1, 1000));
        assert_eq!(from_f64(0.8157).unwrap(), ratio(8157, 10000));
    }

    #[test]
    fn snap_to_grid() {
        let d = ratio(1, 1000);
        assert_eq!(snap(&ratio(8157, 10000), &d), ratio(816, 1000));
        assert_eq!(snap(&ratio(7066, 10000), &d), ratio(707, 1000));
        assert_eq!(snap(&ratio(1, 2), &d), ratio(1, 2));
    }
}
