//! Floating-point types the steppers run on: `f64`, [`MpFloat`] and
//! forward-mode dual numbers over either.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::exactnum::{MpFloat, Scalar};

/// Real arithmetic usable by vector fields and steppers.
///
/// Constants are created "like" an existing value so that they carry its
/// precision; dual numbers create constants with a zero tangent.
pub trait Real:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// The constant `x` at the precision of `self`.
    fn cst(&self, x: f64) -> Self;

    /// `x` rounded to the precision of `self`.
    fn from_scalar(&self, x: &Scalar) -> Self;

    /// Leading value as a double.
    fn to_f64(&self) -> f64;

    /// Largest absolute value over the value and all tangent components.
    fn magnitude(&self) -> f64;

    /// Copy with every tangent component dropped.
    fn value(&self) -> Self;

    /// Binary precision of the value.
    fn precision(&self) -> u32;

    fn sqrt(&self) -> Self;

    /// A stepper coefficient at the precision of `self`.
    fn coeff(&self, c: &Coeff) -> Self {
        self.from_scalar(&c.exact)
    }

    fn zero_like(&self) -> Self {
        self.cst(0.0)
    }

    /// Unit roundoff 2^(1−precision).
    fn epsilon(&self) -> f64 {
        2f64.powi(1 - self.precision() as i32)
    }
}

/// An exact coefficient with cached roundings.
#[derive(Debug, Clone)]
pub struct Coeff {
    pub exact: Scalar,
    f: f64,
    mp: MpFloat,
}

impl Coeff {
    /// Caches the double and the `bits`-bit rounding of `x`.
    pub fn new(x: &Scalar, bits: u32) -> Self {
        Coeff {
            exact: x.clone(),
            f: x.to_f64(),
            mp: x.to_float(bits),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.f
    }
}

impl Real for f64 {
    fn cst(&self, x: f64) -> Self {
        x
    }

    fn from_scalar(&self, x: &Scalar) -> Self {
        x.to_f64()
    }

    fn coeff(&self, c: &Coeff) -> Self {
        c.f
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn value(&self) -> Self {
        *self
    }

    fn precision(&self) -> u32 {
        53
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
}

impl Real for MpFloat {
    fn cst(&self, x: f64) -> Self {
        MpFloat::with_f64(self.precision(), x)
    }

    fn from_scalar(&self, x: &Scalar) -> Self {
        x.to_float(MpFloat::precision(self))
    }

    fn coeff(&self, c: &Coeff) -> Self {
        if c.mp.precision() == MpFloat::precision(self) {
            c.mp.clone()
        } else {
            self.from_scalar(&c.exact)
        }
    }

    fn to_f64(&self) -> f64 {
        MpFloat::to_f64(self)
    }

    fn magnitude(&self) -> f64 {
        MpFloat::to_f64(self).abs()
    }

    fn value(&self) -> Self {
        self.clone()
    }

    fn precision(&self) -> u32 {
        MpFloat::precision(self)
    }

    fn sqrt(&self) -> Self {
        MpFloat::sqrt(self)
    }
}

/// Value plus a tangent vector; an empty tangent means zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: Vec<T>,
}

impl<T: Real> Dual<T> {
    pub fn constant(v: T) -> Self {
        Dual { v, d: Vec::new() }
    }

    /// Variable number `i` of `n`: tangent is the i-th unit vector.
    pub fn variable(v: T, i: usize, n: usize) -> Self {
        let d = (0..n).map(|j| v.cst(if i == j { 1.0 } else { 0.0 })).collect();
        Dual { v, d }
    }

    /// Tangent component `j` (zero when absent).
    pub fn tangent(&self, j: usize) -> T {
        self.d.get(j).cloned().unwrap_or_else(|| self.v.zero_like())
    }

    fn zip_tangents(a: &[T], b: &[T], f: impl Fn(Option<&T>, Option<&T>) -> T) -> Vec<T> {
        (0..a.len().max(b.len())).map(|j| f(a.get(j), b.get(j))).collect()
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let d = Dual::zip_tangents(&self.d, &rhs.d, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.clone() + y.clone(),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        });
        Dual { v: self.v + rhs.v, d }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let d = Dual::zip_tangents(&self.d, &rhs.d, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.clone() - y.clone(),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => -y.clone(),
            (None, None) => unreachable!(),
        });
        Dual { v: self.v - rhs.v, d }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let d = Dual::zip_tangents(&self.d, &rhs.d, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.clone() * rhs.v.clone() + self.v.clone() * y.clone(),
            (Some(x), None) => x.clone() * rhs.v.clone(),
            (None, Some(y)) => self.v.clone() * y.clone(),
            (None, None) => unreachable!(),
        });
        Dual { v: self.v * rhs.v, d }
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let v = self.v / rhs.v.clone();
        // (x/y)' = (x' − v y') / y
        let d = Dual::zip_tangents(&self.d, &rhs.d, |x, y| match (x, y) {
            (Some(x), Some(y)) => (x.clone() - v.clone() * y.clone()) / rhs.v.clone(),
            (Some(x), None) => x.clone() / rhs.v.clone(),
            (None, Some(y)) => -(v.clone() * y.clone()) / rhs.v.clone(),
            (None, None) => unreachable!(),
        });
        Dual { v, d }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            v: -self.v,
            d: self.d.into_iter().map(|x| -x).collect(),
        }
    }
}

impl<T: Real> Real for Dual<T> {
    fn cst(&self, x: f64) -> Self {
        Dual::constant(self.v.cst(x))
    }

    fn from_scalar(&self, x: &Scalar) -> Self {
        Dual::constant(self.v.from_scalar(x))
    }

    fn coeff(&self, c: &Coeff) -> Self {
        Dual::constant(self.v.coeff(c))
    }

    fn to_f64(&self) -> f64 {
        self.v.to_f64()
    }

    fn magnitude(&self) -> f64 {
        self.d.iter().map(Real::magnitude).fold(self.v.magnitude(), f64::max)
    }

    fn value(&self) -> Self {
        Dual::constant(self.v.value())
    }

    fn precision(&self) -> u32 {
        self.v.precision()
    }

    fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let twice = s.clone() + s.clone();
        Dual {
            d: self.d.iter().map(|x| x.clone() / twice.clone()).collect(),
            v: s,
        }
    }
}

/// ‖x‖∞ by [`Real::magnitude`].
pub fn max_magnitude<T: Real>(x: &[T]) -> f64 {
    x.iter().map(Real::magnitude).fold(0.0, f64::max)
}

/// Vector helpers.
pub(crate) fn axpy<T: Real>(y: &[T], a: &T, x: &[T]) -> Vec<T> {
    y.iter().zip(x).map(|(yi, xi)| yi.clone() + a.clone() * xi.clone()).collect()
}

pub(crate) fn sub<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(a, b)| a.clone() - b.clone()).collect()
}

pub(crate) fn add<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(a, b)| a.clone() + b.clone()).collect()
}

/// Converts a state to type `T` at the precision of `like`.
pub fn lift<T: Real>(like: &T, z: &[f64]) -> Vec<T> {
    z.iter().map(|&x| like.cst(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_rules() {
        let x = Dual::variable(3.0, 0, 2);
        let y = Dual::variable(2.0, 1, 2);
        let p = x.clone() * y.clone();
        assert_eq!((p.v, p.tangent(0), p.tangent(1)), (6.0, 2.0, 3.0));
        let q = x.clone() / y.clone();
        assert_eq!((q.v, q.tangent(0), q.tangent(1)), (1.5, 0.5, -0.75));
        let c = x.cst(5.0);
        let s = (c - x.clone()).sqrt();
        assert!((s.v - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.tangent(0) + 0.5 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.magnitude(), 6.0);
        assert!(p.value().d.is_empty());
    }

    #[test]
    fn nested_duals_give_second_derivatives() {
        // f(x) = x³ at x = 2: f' = 12, f'' = 12
        let inner = Dual::variable(2.0, 0, 1);
        let x = Dual {
            v: inner.clone(),
            d: vec![inner.cst(1.0)],
        };
        let f = x.clone() * x.clone() * x;
        assert_eq!(f.v.v, 8.0);
        assert_eq!(f.tangent(0).v, 12.0);
        assert_eq!(f.tangent(0).tangent(0), 12.0);
    }

    #[test]
    fn mp_constants_follow_precision() {
        let x = MpFloat::with_f64(200, 1.0);
        assert_eq!(Real::precision(&x.cst(0.5)), 200);
        assert_eq!(Real::precision(&x.from_scalar(&Scalar::ratio(1, 3))), 200);
        assert!((x.epsilon() - 2f64.powi(-199)).abs() < 1e-70);
    }
}
