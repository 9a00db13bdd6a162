//! Small exact-arithmetic helpers on top of `num-bigint` / `num-rational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseNumError {
    #[error("invalid integer literal `{0}`")]
    Integer(String),
    #[error("invalid rational literal `{0}`")]
    Rational(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_int(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

pub fn parse_int(s: &str) -> Result<BigInt, ParseNumError> {
    let t = s.trim();
    BigInt::from_str(t).map_err(|_| ParseNumError::Integer(s.to_string()))
}

/// Parses `"p/q"` or a bare integer. The result is always normalized.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseNumError> {
    let t = s.trim();
    match t.split_once('/') {
        None => Ok(BigRational::from_integer(
            BigInt::from_str(t).map_err(|_| ParseNumError::Rational(s.to_string()))?,
        )),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| ParseNumError::Rational(s.to_string()))?;
            let d = BigInt::from_str(d.trim()).map_err(|_| ParseNumError::Rational(s.to_string()))?;
            if d.is_zero() {
                return Err(ParseNumError::ZeroDenominator(s.to_string()));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// `"p/q"` in lowest terms, or just `"p"` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor_rational(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Least integer `s >= 0` with `s * s >= n`. Panics on negative input.
pub fn ceil_sqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "ceil_sqrt of negative number");
    let r = n.sqrt();
    if &(&r * &r) == n {
        r
    } else {
        r + 1
    }
}

/// Decimal approximation for display only.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational(" -2 / 4").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), ratio(7, 1));
        assert_eq!(format_rational(&ratio(1297, 1296)), "1297/1296");
        assert_eq!(format_rational(&ratio(2592, 2)), "1296");
        assert_eq!(format_rational(&ratio(3, -6)), "-1/2");
        assert!(matches!(parse_rational("1/0"), Err(ParseNumError::ZeroDenominator(_))));
        assert!(parse_int("12x").is_err());
    }

    #[test]
    fn floor_handles_negatives() {
        assert_eq!(floor_rational(&ratio(7, 2)), int(3));
        assert_eq!(floor_rational(&ratio(-7, 2)), int(-4));
        assert_eq!(floor_rational(&ratio(6, 1)), int(6));
    }

    // Linear scan oracle, independent of the library square root.
    fn ceil_sqrt_scan(n: u64) -> u64 {
        (0..).find(|s: &u64| s * s >= n).unwrap()
    }

    #[test]
    fn ceil_sqrt_matches_scan() {
        for n in 0..5000u64 {
            assert_eq!(ceil_sqrt(&BigInt::from(n)), BigInt::from(ceil_sqrt_scan(n)), "n={n}");
        }
    }

    #[test]
    fn ceil_sqrt_large() {
        // 1298^2 * 1297: bisection over integers is the oracle here.
        let n = int(1298) * int(1298) * int(1297);
        let (mut lo, mut hi) = (int(0), n.clone());
        while lo < hi {
            let mid: BigInt = (&lo + &hi) / 2;
            if &mid * &mid >= n {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        assert_eq!(ceil_sqrt(&n), lo);
    }
}
