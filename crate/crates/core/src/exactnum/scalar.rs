use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::float::{check_precision, DEFAULT_PRECISION};
use super::{CubicNum, MpFloat, Rational};
use crate::error::{Error, Result};

/// A tableau coefficient: exact rational, exact element of Q(2^(1/3)), or a
/// float of explicit binary precision.
///
/// Mixed arithmetic promotes Rational → Cubic → Float. Cubic results whose
/// irrational part vanishes are stored as Rational; exact values never turn
/// into floats unless a float operand is involved.
#[derive(Clone)]
pub enum Scalar {
    Rational(Rational),
    Cubic(CubicNum),
    Float(MpFloat),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    Cubic,
    Float,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(Rational::from_int(n))
    }

    /// Exact `num/den`. Panics on a zero denominator (literal constants only).
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Rational(Rational::new(num, den).expect("nonzero denominator"))
    }

    pub fn float(bits: u32, x: f64) -> Self {
        Scalar::Float(MpFloat::with_f64(bits, x))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Scalar::Rational(Rational::parse(s)?))
    }

    pub fn from_cubic(c: CubicNum) -> Self {
        match c.as_rational() {
            Some(r) => Scalar::Rational(r.clone()),
            None => Scalar::Cubic(c),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Rational(_) => ScalarKind::Rational,
            Scalar::Cubic(_) => ScalarKind::Cubic,
            Scalar::Float(_) => ScalarKind::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Float(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Cubic(c) => c.is_zero(),
            Scalar::Float(f) => f.is_zero(),
        }
    }

    /// Exact zero test for exact kinds; `|x| ≤ tol` for floats.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        match self {
            Scalar::Float(f) => f.cmp_abs_f64(tol) != std::cmp::Ordering::Greater,
            _ => self.is_zero(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Cubic(c) => c.as_rational(),
            Scalar::Float(_) => None,
        }
    }

    fn to_cubic(&self) -> Option<CubicNum> {
        match self {
            Scalar::Rational(r) => Some(CubicNum::from_rational(r.clone())),
            Scalar::Cubic(c) => Some(c.clone()),
            Scalar::Float(_) => None,
        }
    }

    /// Rounded to `bits` binary digits (see [`MpFloat::from_cubic`]).
    pub fn to_float(&self, bits: u32) -> MpFloat {
        match self {
            Scalar::Rational(r) => MpFloat::from_rational(r, bits),
            Scalar::Cubic(c) => MpFloat::from_cubic(c, bits),
            Scalar::Float(f) => MpFloat(rug::Float::with_val(bits, &f.0)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64(),
            Scalar::Cubic(c) => MpFloat::from_cubic(c, DEFAULT_PRECISION).to_f64(),
            Scalar::Float(f) => f.to_f64(),
        }
    }

    /// Float copy at the given precision; exact values are rounded once.
    pub fn into_float_kind(&self, bits: u32) -> Result<Scalar> {
        check_precision(bits)?;
        Ok(Scalar::Float(self.to_float(bits)))
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Rational(r) => Ok(Scalar::Rational(r.recip()?)),
            Scalar::Cubic(c) => Ok(Scalar::from_cubic(c.inv()?)),
            Scalar::Float(f) => {
                if f.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Scalar::Float(&MpFloat::with_f64(f.precision(), 1.0) / f))
            }
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.inv()?)
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.abs()),
            Scalar::Float(f) => Scalar::Float(f.abs()),
            Scalar::Cubic(_) => {
                if self.to_f64() < 0.0 {
                    -self
                } else {
                    self.clone()
                }
            }
        }
    }

    /// Decimal rendering used alongside exact JSON encodings.
    pub fn decimal(&self) -> String {
        match self {
            Scalar::Float(f) => f.to_decimal(),
            _ => format!("{:?}", self.to_f64()),
        }
    }

    fn float_pair(a: &Scalar, b: &Scalar) -> (MpFloat, MpFloat) {
        let bits = match (a, b) {
            (Scalar::Float(x), Scalar::Float(y)) => x.precision().max(y.precision()),
            (Scalar::Float(x), _) | (_, Scalar::Float(x)) => x.precision(),
            _ => unreachable!("float_pair needs a float operand"),
        };
        (a.to_float(bits), b.to_float(bits))
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.$method(b)),
                    (Scalar::Float(_), _) | (_, Scalar::Float(_)) => {
                        let (a, b) = Scalar::float_pair(self, rhs);
                        Scalar::Float((&a).$method(&b))
                    }
                    _ => {
                        let a = self.to_cubic().expect("exact");
                        let b = rhs.to_cubic().expect("exact");
                        Scalar::from_cubic((&a).$method(&b))
                    }
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Cubic(c) => Scalar::Cubic(-c),
            Scalar::Float(f) => Scalar::Float(-f.clone()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Float(_), _) | (_, Scalar::Float(_)) => {
                let (a, b) = Scalar::float_pair(self, other);
                a == b
            }
            _ => self.to_cubic() == other.to_cubic(),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<CubicNum> for Scalar {
    fn from(c: CubicNum) -> Self {
        Scalar::from_cubic(c)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Cubic(c) => write!(f, "{c}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ScalarRepr {
    Rational {
        num: String,
        den: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        decimal: Option<String>,
    },
    Cubic {
        c: [[String; 2]; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        decimal: Option<String>,
    },
    Float {
        bits: u32,
        hex: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        decimal: Option<String>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarInput {
    Tagged(ScalarRepr),
    Text(String),
    Number(f64),
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let decimal = Some(self.decimal());
        let repr = match self {
            Scalar::Rational(r) => ScalarRepr::Rational {
                num: r.numer_string(),
                den: r.denom_string(),
                decimal,
            },
            Scalar::Cubic(c) => {
                let pair = |r: &Rational| [r.numer_string(), r.denom_string()];
                let [a, b, d] = c.coeffs();
                ScalarRepr::Cubic {
                    c: [pair(a), pair(b), pair(d)],
                    decimal,
                }
            }
            Scalar::Float(f) => ScalarRepr::Float {
                bits: f.precision(),
                hex: f.to_hex(),
                decimal,
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let input = ScalarInput::deserialize(deserializer)?;
        let scalar = match input {
            ScalarInput::Tagged(ScalarRepr::Rational { num, den, .. }) => {
                Rational::from_big(&num, &den).map(Scalar::Rational)
            }
            ScalarInput::Tagged(ScalarRepr::Cubic { c, .. }) => {
                let parse = |p: &[String; 2]| Rational::from_big(&p[0], &p[1]);
                (|| {
                    Ok(Scalar::from_cubic(CubicNum::new(
                        parse(&c[0])?,
                        parse(&c[1])?,
                        parse(&c[2])?,
                    )))
                })()
            }
            ScalarInput::Tagged(ScalarRepr::Float { bits, hex, .. }) => {
                check_precision(bits).and_then(|b| MpFloat::from_hex(b, &hex).map(Scalar::Float))
            }
            ScalarInput::Text(s) => Scalar::parse(&s),
            ScalarInput::Number(x) => Ok(Scalar::float(DEFAULT_PRECISION, x)),
        };
        scalar.map_err(D::Error::custom)
    }
}
