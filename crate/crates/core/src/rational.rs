//! Exact rationals and their `p/q` text form.

use alloc::string::String;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Error returned when a `p/q` literal cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `p`, `p/q`, `-p/q` (surrounding whitespace allowed). A zero
/// denominator is rejected.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let bad = || ParseRationalError(String::from(text));
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Formats as `p/q`, omitting `/q` when `q = 1`.
pub fn format_rational(value: &Rational) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    if value.denom().is_one() {
        let _ = write!(out, "{}", value.numer());
    } else {
        let _ = write!(out, "{}/{}", value.numer(), value.denom());
    }
    out
}

/// Shorthand for an integer-valued rational.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Shorthand for `num/den`. Panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Decimal approximation with `digits` digits after the point (truncated
/// toward zero). Only used for human-readable output.
pub fn to_decimal(value: &Rational, digits: usize) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    if value.is_negative() {
        out.push('-');
    }
    let abs = value.abs();
    let whole = abs.numer() / abs.denom();
    let _ = write!(out, "{whole}");
    if digits > 0 {
        out.push('.');
        let mut rem = abs.numer() % abs.denom();
        for _ in 0..digits {
            rem *= 10;
            let digit = &rem / abs.denom();
            let _ = write!(out, "{digit}");
            rem %= abs.denom();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        assert_eq!(parse_rational("2/4").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" -3 ").unwrap(), int(-3));
        assert_eq!(parse_rational("3/-6").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn formats_without_unit_denominator() {
        assert_eq!(format_rational(&ratio(6, 3)), "2");
        assert_eq!(format_rational(&ratio(-1, 6)), "-1/6");
    }

    #[test]
    fn decimal_truncates() {
        assert_eq!(to_decimal(&ratio(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&ratio(-7, 2), 1), "-3.5");
    }
}
