//! Exact arithmetic over Q and the cubic field Q(2^(1/3)), plus floats of
//! configurable binary precision.
//!
//! Every coefficient of the fourth-order composition schemes used here lives
//! in Q(2^(1/3)), so order conditions for them can be decided exactly.

mod cubic;
mod float;
mod rational;
mod scalar;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cubic::CubicNum;
pub use float::{check_precision, MpFloat, DEFAULT_PRECISION, MAX_PRECISION};
pub use rational::Rational;
pub use scalar::{Scalar, ScalarKind};

use crate::error::Error;

/// Product of `x` and `y`, reduced by θ³ = 2.
pub fn cubic_mul(x: &CubicNum, y: &CubicNum) -> CubicNum {
    x * y
}

pub fn cubic_inv(x: &CubicNum) -> crate::Result<CubicNum> {
    x.inv()
}

/// Rounds `x` to `precision_bits` binary digits.
pub fn to_float(x: &Scalar, precision_bits: u32) -> crate::Result<MpFloat> {
    check_precision(precision_bits)?;
    Ok(x.to_float(precision_bits))
}

/// Composition schemes built from the second-order extended-phase-space
/// leapfrog step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// One leapfrog step, order 2.
    Leapfrog2,
    /// Triple jump (α, 1−2α, α) with α = 1/(2−2^(1/3)), order 4.
    TripleJump4,
    /// Five-stage (α, α, 1−4α, α, α) with α = 1/(4−4^(1/3)), order 4.
    Suzuki4,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Leapfrog2, Scheme::TripleJump4, Scheme::Suzuki4];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Leapfrog2 => "leapfrog2",
            Scheme::TripleJump4 => "triplejump4",
            Scheme::Suzuki4 => "suzuki4",
        }
    }

    pub fn classical_order(self) -> u32 {
        match self {
            Scheme::Leapfrog2 => 2,
            Scheme::TripleJump4 | Scheme::Suzuki4 => 4,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "leapfrog2" | "leapfrog" => Ok(Scheme::Leapfrog2),
            "triplejump4" | "triplejump" => Ok(Scheme::TripleJump4),
            "suzuki4" | "suzuki" => Ok(Scheme::Suzuki4),
            _ => Err(Error::Parse(format!("unknown scheme {s:?}"))),
        }
    }
}

/// Substep weights of the composition scheme; each list sums to one exactly.
pub fn composition_alphas(scheme: Scheme) -> Vec<Scalar> {
    let q = |n: i64| Rational::from_int(n);
    match scheme {
        Scheme::Leapfrog2 => vec![Scalar::one()],
        Scheme::TripleJump4 => {
            // α = 1/(2 − θ)
            let alpha = CubicNum::new(q(2), q(-1), q(0))
                .inv()
                .expect("2 - 2^(1/3) is nonzero");
            let alpha = Scalar::from(alpha);
            let middle = Scalar::one() - Scalar::int(2) * &alpha;
            vec![alpha.clone(), middle, alpha]
        }
        Scheme::Suzuki4 => {
            // α = 1/(4 − θ²), since 4^(1/3) = θ²
            let alpha = CubicNum::new(q(4), q(0), q(-1))
                .inv()
                .expect("4 - 4^(1/3) is nonzero");
            let alpha = Scalar::from(alpha);
            let middle = Scalar::one() - Scalar::int(4) * &alpha;
            vec![alpha.clone(), alpha.clone(), middle, alpha.clone(), alpha]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphas_sum_to_one() {
        for scheme in Scheme::ALL {
            let total = composition_alphas(scheme)
                .iter()
                .fold(Scalar::zero(), |acc, a| acc + a);
            assert_eq!(total, Scalar::one(), "{scheme}");
        }
        assert_eq!(composition_alphas(Scheme::Leapfrog2), vec![Scalar::one()]);
    }

    #[test]
    fn alpha_decimals() {
        let tj = composition_alphas(Scheme::TripleJump4);
        assert_eq!(tj.len(), 3);
        assert!((tj[0].to_f64() - 1.3512071919596576).abs() < 1e-15);
        let sz = composition_alphas(Scheme::Suzuki4);
        assert_eq!(sz.len(), 5);
        assert!((sz[0].to_f64() - 0.4144907717943757).abs() < 1e-15);
    }

    #[test]
    fn to_float_values() {
        assert_eq!(to_float(&Scalar::ratio(1, 2), 53).unwrap().to_f64(), 0.5);
        let theta = Scalar::from(CubicNum::theta());
        assert_eq!(to_float(&theta, 53).unwrap().to_f64(), 1.2599210498948732);
        let tj = &composition_alphas(Scheme::TripleJump4)[0];
        assert_eq!(to_float(tj, 53).unwrap().to_f64(), 1.3512071919596575);
        assert!(to_float(&theta, 40).is_err());
    }
}
