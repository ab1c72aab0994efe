use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Rational(pub(crate) rug::Rational);

impl Rational {
    pub fn zero() -> Self {
        Rational(rug::Rational::new())
    }

    pub fn one() -> Self {
        Rational::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Rational(rug::Rational::from(n))
    }

    /// `num / den`, reduced. Fails on a zero denominator.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(rug::Rational::from((num, den))))
    }

    /// Parses `"p"`, `"p/q"` or a finite decimal literal such as `"0.125"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n = rug::Integer::from_str(n.trim()).map_err(|_| bad())?;
            let d = rug::Integer::from_str(d.trim()).map_err(|_| bad())?;
            if d == 0 {
                return Err(Error::DivisionByZero);
            }
            return Ok(Rational(rug::Rational::from((n, d))));
        }
        if let Some((int_part, frac)) = s.split_once('.') {
            let neg = int_part.starts_with('-');
            let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac);
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let n = rug::Integer::from_str(&digits).map_err(|_| bad())?;
            let d = rug::Integer::from(rug::Integer::u_pow_u(10, frac.len() as u32));
            let r = rug::Rational::from((n, d));
            return Ok(Rational(if neg { -r } else { r }));
        }
        let n = rug::Integer::from_str(s).map_err(|_| bad())?;
        Ok(Rational(rug::Rational::from(n)))
    }

    pub fn from_big(num: &str, den: &str) -> Result<Self> {
        Rational::parse(&format!("{num}/{den}"))
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_one(&self) -> bool {
        self.0 == 1
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn numer_string(&self) -> String {
        self.0.numer().to_string()
    }

    pub fn denom_string(&self) -> String {
        self.0.denom().to_string()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.clone().recip()))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.clone().abs())
    }

    /// Nearest double (correctly rounded).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn as_rug(&self) -> &rug::Rational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<rug::Rational> for Rational {
    fn from(r: rug::Rational) -> Self {
        Rational(r)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(rug::Rational::from((&self.0).$method(&rhs.0)))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);

impl Div<&Rational> for &Rational {
    type Output = Rational;
    /// Panics on division by zero; use [`Rational::recip`] for a checked path.
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(rug::Rational::from(&self.0 / &rhs.0))
    }
}

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(rug::Rational::from(-&self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_sign() {
        let r = Rational::new(6, -8).unwrap();
        assert_eq!(r.numer_string(), "-3");
        assert_eq!(r.denom_string(), "4");
        assert!(Rational::new(0, 5).unwrap() == Rational::zero());
        assert_eq!(Rational::zero().denom_string(), "1");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Rational::parse("1/4").unwrap(), Rational::new(1, 4).unwrap());
        assert_eq!(Rational::parse("-0.125").unwrap(), Rational::new(-1, 8).unwrap());
        assert_eq!(Rational::parse("3").unwrap(), Rational::from_int(3));
        assert!(matches!(Rational::parse("1/0"), Err(Error::DivisionByZero)));
        assert!(Rational::parse("x").is_err());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(Rational::new(1, 0), Err(Error::DivisionByZero)));
        assert!(Rational::zero().recip().is_err());
    }
}
