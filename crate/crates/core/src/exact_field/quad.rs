use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, rational_to_f64, Rational};
use crate::error::{Error, Result};

/// Radicand tag carried by values that are known to be rational.
const ANY_RADICAND: u32 = 0;

/// An element `a + b·√d` of the quadratic field `Q(√d)`.
///
/// Purely rational values (`b = 0`) built with [`QuadExt::rational`] carry no
/// radicand and combine with values of any field. Combining two irrational
/// values over different radicands is a logic error and panics; bodies reject
/// mixed radicands when they are constructed.
#[derive(Clone, Debug)]
pub struct QuadExt {
    rat: Rational,
    surd: Rational,
    radicand: u32,
}

pub fn is_square_free(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2u32;
    while p.saturating_mul(p) <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

fn merge_radicand(a: u32, b: u32) -> u32 {
    match (a, b) {
        (ANY_RADICAND, d) | (d, ANY_RADICAND) => d,
        (x, y) if x == y => x,
        (x, y) => panic!("mixed radicands {x} and {y}"),
    }
}

impl QuadExt {
    pub fn new(rat: Rational, surd: Rational, radicand: u32) -> Result<Self> {
        if !is_square_free(radicand) {
            return Err(Error::InvalidRadicand(radicand));
        }
        Ok(Self { rat, surd, radicand })
    }

    pub fn rational(rat: Rational) -> Self {
        Self { rat, surd: Rational::zero(), radicand: ANY_RADICAND }
    }

    pub fn from_int(v: i64) -> Self {
        Self::rational(Rational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    /// `√d` itself.
    pub fn sqrt(radicand: u32) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), radicand)
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn surd_part(&self) -> &Rational {
        &self.surd
    }

    /// The radicand, or `None` for a value constructed as purely rational.
    pub fn radicand(&self) -> Option<u32> {
        (self.radicand != ANY_RADICAND).then_some(self.radicand)
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    /// Exact sign of `a + b√d`.
    pub fn sign(&self) -> i8 {
        let sa = sign_of(&self.rat);
        let sb = sign_of(&self.surd);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: the larger magnitude of a² and d·b² wins
        let a2 = &self.rat * &self.rat;
        let db2 = &self.surd * &self.surd * Rational::from_integer(BigInt::from(self.radicand));
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(Self { rat: self.rat.recip(), surd: Rational::zero(), radicand: self.radicand });
        }
        let d = Rational::from_integer(BigInt::from(self.radicand));
        let norm = &self.rat * &self.rat - &self.surd * &self.surd * d;
        Some(Self {
            rat: &self.rat / &norm,
            surd: -(&self.surd / &norm),
            radicand: self.radicand,
        })
    }

    pub fn to_f64(&self) -> f64 {
        let a = rational_to_f64(&self.rat);
        if self.surd.is_zero() {
            return a;
        }
        a + rational_to_f64(&self.surd) * f64::from(self.radicand).sqrt()
    }

    /// Same value re-tagged with an explicit radicand.
    pub fn with_radicand(mut self, radicand: u32) -> Self {
        self.radicand = merge_radicand(self.radicand, radicand);
        self
    }

    /// `["a", "b"]` pair of rational strings.
    pub fn to_pair_strings(&self) -> [String; 2] {
        [format_rational(&self.rat), format_rational(&self.surd)]
    }
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.rat == other.rat
            && self.surd == other.surd
            && (self.surd.is_zero()
                || self.radicand == other.radicand
                || self.radicand == ANY_RADICAND
                || other.radicand == ANY_RADICAND)
    }
}

impl Eq for QuadExt {}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return write!(f, "{}", format_rational(&self.rat));
        }
        let root = format!("√{}", self.radicand);
        let surd = if self.surd.is_one() {
            root
        } else if (-&self.surd).is_one() {
            format!("-{root}")
        } else {
            format!("{}{root}", format_rational(&self.surd))
        };
        if self.rat.is_zero() {
            write!(f, "{surd}")
        } else if self.surd.is_positive() {
            write!(f, "{}+{surd}", format_rational(&self.rat))
        } else {
            write!(f, "{}{surd}", format_rational(&self.rat))
        }
    }
}

impl<'a> Add<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &'a QuadExt) -> QuadExt {
        QuadExt {
            rat: &self.rat + &rhs.rat,
            surd: &self.surd + &rhs.surd,
            radicand: merge_radicand(self.radicand, rhs.radicand),
        }
    }
}

impl<'a> Sub<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &'a QuadExt) -> QuadExt {
        QuadExt {
            rat: &self.rat - &rhs.rat,
            surd: &self.surd - &rhs.surd,
            radicand: merge_radicand(self.radicand, rhs.radicand),
        }
    }
}

impl<'a> Mul<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &'a QuadExt) -> QuadExt {
        let radicand = merge_radicand(self.radicand, rhs.radicand);
        if self.surd.is_zero() {
            return QuadExt { rat: &self.rat * &rhs.rat, surd: &self.rat * &rhs.surd, radicand };
        }
        if rhs.surd.is_zero() {
            return QuadExt { rat: &self.rat * &rhs.rat, surd: &self.surd * &rhs.rat, radicand };
        }
        let d = Rational::from_integer(BigInt::from(radicand));
        QuadExt {
            rat: &self.rat * &rhs.rat + &self.surd * &rhs.surd * d,
            surd: &self.rat * &rhs.surd + &self.surd * &rhs.rat,
            radicand,
        }
    }
}

impl<'a> Div<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: &'a QuadExt) -> QuadExt {
        let inv = rhs.inv().expect("division by zero in Q(√d)");
        self * &inv
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { rat: -&self.rat, surd: -&self.surd, radicand: self.radicand }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { rat: -self.rat, surd: -self.surd, radicand: self.radicand }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: QuadExt) -> QuadExt { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: &'a QuadExt) -> QuadExt { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt::rational(r)
    }
}

impl From<i64> for QuadExt {
    fn from(v: i64) -> Self {
        QuadExt::from_int(v)
    }
}

impl From<&BigInt> for QuadExt {
    fn from(v: &BigInt) -> Self {
        QuadExt::rational(Rational::from_integer(v.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_field::rational::rational_from_int;

    fn q(a: i64, b: i64, d: u32) -> QuadExt {
        QuadExt::new(rational_from_int(a), rational_from_int(b), d).unwrap()
    }

    #[test]
    fn sign_examples() {
        assert_eq!(q(0, 0, 2).sign(), 0);
        assert_eq!(q(-1, 1, 2).sign(), 1);
        assert_eq!(q(3, -2, 2).sign(), 1);
        assert_eq!(q(1, -1, 2).sign(), -1);
        assert_eq!(q(-3, 2, 2).sign(), -1);
        assert_eq!(q(-2, -1, 3).sign(), -1);
    }

    #[test]
    fn radicand_validation() {
        assert!(is_square_free(2) && is_square_free(6) && is_square_free(15));
        assert!(!is_square_free(1) && !is_square_free(4) && !is_square_free(12));
        assert!(QuadExt::new(rational_from_int(1), rational_from_int(1), 8).is_err());
    }

    #[test]
    fn inverse_and_product() {
        let x = q(1, 1, 2);
        let inv = x.inv().unwrap();
        assert_eq!(&x * &inv, QuadExt::one());
        assert_eq!(inv, q(-1, 1, 2));
        let r2 = QuadExt::sqrt(2).unwrap();
        assert_eq!(&r2 * &r2, QuadExt::from_int(2));
        assert!(QuadExt::zero().inv().is_none());
    }

    #[test]
    fn ordering_and_display() {
        let r2 = QuadExt::sqrt(2).unwrap();
        assert!(r2 > QuadExt::one());
        assert!(r2 < QuadExt::from_int(2));
        assert_eq!(q(1, -1, 2).to_string(), "1-√2");
        assert_eq!((q(0, 3, 5)).to_string(), "3√5");
        assert!((r2.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "mixed radicands")]
    fn mixed_radicands_panic() {
        let _ = &q(0, 1, 2) + &q(0, 1, 3);
    }
}
