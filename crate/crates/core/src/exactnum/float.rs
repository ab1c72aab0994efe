use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::CompleteRound;
use rug::Float;

use super::{CubicNum, Rational};
use crate::error::{Error, Result};

/// Default binary precision for floats (IEEE double).
pub const DEFAULT_PRECISION: u32 = 53;
/// Upper bound accepted for configurable precision.
pub const MAX_PRECISION: u32 = 4096;

/// Binary floating-point number with an explicit precision in bits.
///
/// Binary operations round to the larger of the two operand precisions.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct MpFloat(pub(crate) Float);

pub fn check_precision(bits: u32) -> Result<u32> {
    if !(DEFAULT_PRECISION..=MAX_PRECISION).contains(&bits) {
        return Err(Error::Precision(bits));
    }
    Ok(bits)
}

impl MpFloat {
    pub fn with_f64(bits: u32, x: f64) -> Self {
        MpFloat(Float::with_val(bits, x))
    }

    pub fn zero(bits: u32) -> Self {
        MpFloat(Float::new(bits))
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        MpFloat(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        MpFloat(self.0.clone().sqrt())
    }

    pub fn as_rug(&self) -> &Float {
        &self.0
    }

    /// Correctly rounded conversion of a rational.
    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        MpFloat(Float::with_val(bits, &r.0))
    }

    /// Rounded value of `r0 + r1·θ + r2·θ²`.
    ///
    /// Evaluated with guard bits and re-evaluated at higher precision until
    /// two successive evaluations round to the same `bits`-bit float.
    pub fn from_cubic(x: &CubicNum, bits: u32) -> Self {
        if let Some(r) = x.as_rational() {
            return MpFloat::from_rational(r, bits);
        }
        let eval = |work: u32| {
            let theta = Float::with_val(work, 2).cbrt();
            let theta2 = Float::with_val(work, &theta * &theta);
            let [r0, r1, r2] = x.coeffs();
            let mut acc = Float::with_val(work, &r0.0);
            acc += Float::with_val(work, &r1.0) * &theta;
            acc += Float::with_val(work, &r2.0) * &theta2;
            acc
        };
        let mut guard = 64;
        let mut prev = Float::with_val(bits, eval(bits + guard));
        loop {
            guard *= 2;
            let next = Float::with_val(bits, eval(bits + guard));
            if next == prev || guard > 8 * MAX_PRECISION {
                return MpFloat(next);
            }
            prev = next;
        }
    }

    /// Exact hexadecimal rendering `±0x<mantissa>p<exp>` meaning
    /// mantissa · 2^exp.
    pub fn to_hex(&self) -> String {
        match self.0.to_integer_exp() {
            Some((mut m, mut e)) => {
                if m == 0 {
                    return "0x0p0".to_string();
                }
                let tz = m.find_one(0).unwrap_or(0);
                m >>= tz;
                e += tz as i32;
                let sign = if m < 0 { "-" } else { "" };
                format!("{sign}0x{:x}p{e}", m.abs())
            }
            None => format!("{}", self.0),
        }
    }

    pub fn from_hex(bits: u32, s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a hex float: {s:?}"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let body = body.strip_prefix("0x").ok_or_else(bad)?;
        let (mant, exp) = body.split_once('p').ok_or_else(bad)?;
        let m = rug::Integer::from_str_radix(mant, 16).map_err(|_| bad())?;
        let e: i32 = exp.parse().map_err(|_| bad())?;
        let mut f = Float::with_val(bits, m);
        f <<= e;
        Ok(MpFloat(if neg { -f } else { f }))
    }

    /// Decimal rendering with enough digits to identify the value.
    pub fn to_decimal(&self) -> String {
        let digits = (self.precision() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        if self.precision() <= DEFAULT_PRECISION {
            return format!("{:?}", self.to_f64());
        }
        self.0.to_string_radix(10, Some(digits))
    }

    pub fn cmp_abs_f64(&self, tol: f64) -> Ordering {
        self.0
            .cmp_abs(&Float::with_val(DEFAULT_PRECISION, tol))
            .unwrap_or(Ordering::Greater)
    }
}

fn widest(a: &MpFloat, b: &MpFloat) -> u32 {
    a.precision().max(b.precision())
}

macro_rules! mp_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&MpFloat> for &MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: &MpFloat) -> MpFloat {
                let prec = widest(self, rhs);
                MpFloat((&self.0).$method(&rhs.0).complete_round(prec, Round::Nearest).0)
            }
        }
        impl $trait<MpFloat> for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                if self.precision() >= rhs.precision() {
                    MpFloat(self.0.$method(&rhs.0))
                } else {
                    (&self).$method(&rhs)
                }
            }
        }
    };
}

mp_binop!(Add, add);
mp_binop!(Sub, sub);
mp_binop!(Mul, mul);
mp_binop!(Div, div);

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat(-self.0)
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}b]", self.to_decimal(), self.precision())
    }
}
