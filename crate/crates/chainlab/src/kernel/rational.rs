//! Exact rational scalars.
//!
//! All symbolic coefficients in this crate are arbitrary-precision rationals.
//! `num::BigRational` already maintains the invariants we rely on (always
//! reduced to lowest terms, denominator strictly positive, zero stored as
//! 0/1), so the type is re-exported with a few constructors used everywhere.

use num::bigint::BigInt;
use num::traits::ToPrimitive;
use num::{One, Signed, Zero};

pub use num::BigRational as Rational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair.
///
/// Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact conversion of a finite `f64` (every finite double is a rational).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Nearest `f64`; infinite if the value overflows the double range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Parses an exact rational literal: an optional sign, digits, and an
/// optional `/denominator` part. Decimal points are deliberately rejected;
/// exact inputs stay exact.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty rational literal".to_string());
    }
    if t.contains('.') {
        return Err(format!(
            "decimal literal '{t}' is not exact; write it as a fraction like 3/2"
        ));
    }
    let (num_str, den_str) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| format!("invalid integer '{num_str}'"))?;
    let den: BigInt = den_str
        .parse()
        .map_err(|_| format!("invalid integer '{den_str}'"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in '{t}'"));
    }
    Ok(Rational::new(num, den))
}

/// Renders `r` the way `parse_rational` reads it back.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_reduces_to_lowest_terms() {
        let r = ratio(6, 4);
        assert_eq!(r, ratio(3, 2));
        assert_eq!(r.numer(), &BigInt::from(3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn denominator_is_kept_positive() {
        let r = ratio(1, -2);
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.numer(), &BigInt::from(-1));
    }

    #[test]
    fn zero_is_canonical() {
        let z = ratio(0, 7);
        assert!(z.is_zero());
        assert_eq!(z.denom(), &BigInt::from(1));
    }

    #[test]
    fn field_ops() {
        assert_eq!(ratio(1, 2) + ratio(1, 3), ratio(5, 6));
        assert_eq!(ratio(1, 2) * ratio(2, 3), ratio(1, 3));
        assert_eq!(ratio(1, 2) - ratio(1, 2), rat(0));
        assert_eq!(ratio(3, 4) / ratio(3, 2), ratio(1, 2));
    }

    #[test]
    fn f64_round_trip_is_exact() {
        let x = 0.1f64;
        let r = rational_from_f64(x).unwrap();
        assert_eq!(rational_to_f64(&r), x);
        assert_ne!(r, ratio(1, 10), "0.1 is not exactly 1/10 in binary");
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("2/3").unwrap(), ratio(2, 3));
        assert_eq!(parse_rational("-7").unwrap(), rat(-7));
        assert_eq!(parse_rational(" 4/6 ").unwrap(), ratio(2, 3));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&ratio(-3, 7)), "-3/7");
        assert_eq!(format_rational(&rat(12)), "12");
    }
}
