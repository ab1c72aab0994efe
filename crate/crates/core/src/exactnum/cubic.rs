use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::Rational;
use crate::error::{Error, Result};

/// Element `r0 + r1·θ + r2·θ²` of the cubic field Q(θ), θ = 2^(1/3).
///
/// The basis {1, θ, θ²} is linearly independent over Q, so equality is
/// coefficient-wise.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CubicNum {
    c: [Rational; 3],
}

impl CubicNum {
    pub fn new(r0: Rational, r1: Rational, r2: Rational) -> Self {
        CubicNum { c: [r0, r1, r2] }
    }

    pub fn from_rational(r: Rational) -> Self {
        CubicNum::new(r, Rational::zero(), Rational::zero())
    }

    pub fn zero() -> Self {
        CubicNum::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        CubicNum::from_rational(Rational::one())
    }

    /// θ = 2^(1/3).
    pub fn theta() -> Self {
        CubicNum::new(Rational::zero(), Rational::one(), Rational::zero())
    }

    pub fn coeffs(&self) -> &[Rational; 3] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Rational::is_zero)
    }

    /// `Some(r)` when the value lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.c[1].is_zero() && self.c[2].is_zero()).then_some(&self.c[0])
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CubicNum {
            c: [&self.c[0] * r, &self.c[1] * r, &self.c[2] * r],
        }
    }

    /// Matrix of `y ↦ self·y` in the basis {1, θ, θ²}; column k is `self·θ^k`.
    fn multiplication_matrix(&self) -> [[Rational; 3]; 3] {
        let [a0, a1, a2] = &self.c;
        let two = Rational::from_int(2);
        let ta1 = &two * a1;
        let ta2 = &two * a2;
        [
            [a0.clone(), ta2.clone(), ta1],
            [a1.clone(), a0.clone(), ta2],
            [a2.clone(), a1.clone(), a0.clone()],
        ]
    }

    /// Field norm, the determinant of the multiplication matrix:
    /// a0³ + 2a1³ + 4a2³ − 6·a0·a1·a2. Nonzero exactly when `self` is.
    pub fn norm(&self) -> Rational {
        let [a0, a1, a2] = &self.c;
        let cube = |x: &Rational| x * &(x * x);
        cube(a0) + Rational::from_int(2) * cube(a1) + Rational::from_int(4) * cube(a2)
            - Rational::from_int(6) * (a0 * &(a1 * a2))
    }

    /// Exact inverse, found by solving `M(self)·y = e₁` with Gaussian
    /// elimination over Q.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.multiplication_matrix();
        let mut aug: Vec<Vec<Rational>> = (0..3)
            .map(|i| {
                let mut row = m[i].to_vec();
                row.push(if i == 0 { Rational::one() } else { Rational::zero() });
                row
            })
            .collect();
        for col in 0..3 {
            let pivot = (col..3)
                .find(|&r| !aug[r][col].is_zero())
                .expect("multiplication matrix of a nonzero field element is invertible");
            aug.swap(col, pivot);
            let p = aug[col][col].clone();
            for x in aug[col].iter_mut() {
                *x = &*x / &p;
            }
            for r in 0..3 {
                if r != col && !aug[r][col].is_zero() {
                    let factor = aug[r][col].clone();
                    for k in col..4 {
                        let t = &factor * &aug[col][k];
                        aug[r][k] = &aug[r][k] - &t;
                    }
                }
            }
        }
        Ok(CubicNum::new(
            aug[0][3].clone(),
            aug[1][3].clone(),
            aug[2][3].clone(),
        ))
    }
}

impl From<Rational> for CubicNum {
    fn from(r: Rational) -> Self {
        CubicNum::from_rational(r)
    }
}

impl Add<&CubicNum> for &CubicNum {
    type Output = CubicNum;
    fn add(self, rhs: &CubicNum) -> CubicNum {
        CubicNum {
            c: [
                &self.c[0] + &rhs.c[0],
                &self.c[1] + &rhs.c[1],
                &self.c[2] + &rhs.c[2],
            ],
        }
    }
}

impl Sub<&CubicNum> for &CubicNum {
    type Output = CubicNum;
    fn sub(self, rhs: &CubicNum) -> CubicNum {
        CubicNum {
            c: [
                &self.c[0] - &rhs.c[0],
                &self.c[1] - &rhs.c[1],
                &self.c[2] - &rhs.c[2],
            ],
        }
    }
}

impl Mul<&CubicNum> for &CubicNum {
    type Output = CubicNum;
    /// Product reduced with θ³ = 2 and θ⁴ = 2θ.
    fn mul(self, rhs: &CubicNum) -> CubicNum {
        let [a0, a1, a2] = &self.c;
        let [b0, b1, b2] = &rhs.c;
        let two = Rational::from_int(2);
        let c0 = a0 * b0 + &two * &(a1 * b2 + a2 * b1);
        let c1 = a0 * b1 + a1 * b0 + &two * &(a2 * b2);
        let c2 = a0 * b2 + a1 * b1 + a2 * b0;
        CubicNum { c: [c0, c1, c2] }
    }
}

impl Neg for &CubicNum {
    type Output = CubicNum;
    fn neg(self) -> CubicNum {
        CubicNum {
            c: [-&self.c[0], -&self.c[1], -&self.c[2]],
        }
    }
}

impl fmt::Display for CubicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = ["", "θ", "θ²"]
            .iter()
            .zip(&self.c)
            .filter(|(_, r)| !r.is_zero())
            .map(|(b, r)| match (*b, r.is_one()) {
                ("", _) => r.to_string(),
                (b, true) => b.to_string(),
                (b, false) => format!("({r}){b}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for CubicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn cubic(a: i64, b: i64, c: i64) -> CubicNum {
        CubicNum::new(q(a, 1), q(b, 1), q(c, 1))
    }

    #[test]
    fn theta_cubed_is_two() {
        let t = CubicNum::theta();
        let t2 = &t * &t;
        assert_eq!(t2, cubic(0, 0, 1));
        assert_eq!(&t * &t2, cubic(2, 0, 0));
        assert_eq!(&t2 * &t2, cubic(0, 2, 0));
    }

    #[test]
    fn mul_identity_and_known_product() {
        let x = CubicNum::new(q(3, 7), q(-1, 2), q(5, 1));
        assert_eq!(&CubicNum::one() * &x, x);
        // (2 − θ)(4 + 2θ + θ²) = 8 − θ³ = 6
        assert_eq!(&cubic(2, -1, 0) * &cubic(4, 2, 1), cubic(6, 0, 0));
    }

    #[test]
    fn inverses_of_composition_denominators() {
        assert_eq!(CubicNum::one().inv().unwrap(), CubicNum::one());
        let inv = cubic(2, -1, 0).inv().unwrap();
        assert_eq!(inv, CubicNum::new(q(4, 6), q(2, 6), q(1, 6)));
        let inv = cubic(4, 0, -1).inv().unwrap();
        assert_eq!(inv, CubicNum::new(q(8, 30), q(1, 30), q(2, 30)));
        assert_eq!(&inv * &cubic(4, 0, -1), CubicNum::one());
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert!(matches!(CubicNum::zero().inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn norm_is_multiplicative() {
        let x = CubicNum::new(q(1, 2), q(-3, 1), q(2, 5));
        let y = cubic(2, -1, 0);
        assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        assert_eq!(y.norm(), q(6, 1));
    }
}
