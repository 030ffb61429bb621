use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rational_from_int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn rational_from_bigint(v: BigInt) -> Rational {
    BigRational::from_integer(v)
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
    }
}

/// Formats as `"p/q"`, omitting the denominator when it is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Smallest integer `>= r`.
pub fn ceil_to_bigint(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let r = parse_rational("6/-4").unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(format_rational(&parse_rational("7").unwrap()), "7");
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn lowest_terms_after_arithmetic() {
        let a = parse_rational("1/6").unwrap();
        let b = parse_rational("1/3").unwrap();
        let s = a + b;
        assert_eq!(s.numer(), &BigInt::from(1));
        assert_eq!(s.denom(), &BigInt::from(2));
    }

    #[test]
    fn ceil_and_lcm() {
        assert_eq!(ceil_to_bigint(&parse_rational("7/3").unwrap()), BigInt::from(3));
        assert_eq!(ceil_to_bigint(&parse_rational("-7/3").unwrap()), BigInt::from(-2));
        let v = [parse_rational("1/4").unwrap(), parse_rational("5/6").unwrap()];
        assert_eq!(common_denominator(v.iter()), BigInt::from(12));
    }
}
