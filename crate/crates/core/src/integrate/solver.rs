//! Nonlinear solves for the implicit steppers.

use serde::{Deserialize, Serialize};

use super::real::{max_magnitude, Dual, Real};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    FixedPoint,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianKind {
    ForwardSensitivity,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub strategy: Strategy,
    /// Residual ∞-norm at which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub jacobian: JacobianKind,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            strategy: Strategy::Newton,
            tolerance: 1e-12,
            max_iterations: 50,
            jacobian: JacobianKind::FiniteDifference,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Invalid(format!("solver tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Invalid("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// A system G(x) = 0 whose evaluation can run in `T` and in `Dual<T>`.
///
/// `lift` embeds the captured `T` data (state, step size) into `R`.
pub trait Residual<T: Real> {
    fn eval_in<R: Real>(&self, x: &[R], lift: &dyn Fn(&T) -> R) -> Vec<R>;

    fn eval(&self, x: &[T]) -> Vec<T> {
        self.eval_in(x, &|t: &T| t.clone())
    }

    fn eval_dual(&self, x: &[Dual<T>]) -> Vec<Dual<T>> {
        self.eval_in(x, &|t: &T| Dual::constant(t.clone()))
    }
}

#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves G(x) = 0 from `x0`.
///
/// Newton uses a chord iteration: the Jacobian is formed at `x0` and
/// re-formed only when the residual contracts by less than a factor 4. The
/// fixed-point strategy iterates x ← x − `fixed_point_scale`·G(x). Either
/// stops when ‖G‖∞ ≤ tolerance or when the update falls below the working
/// precision.
pub fn solve<T: Real, G: Residual<T>>(
    g: &G,
    x0: Vec<T>,
    cfg: &SolverConfig,
    fixed_point_scale: f64,
) -> Result<Solution<T>> {
    let n = x0.len();
    let mut x = x0;
    if n == 0 {
        return Ok(Solution {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let factor = |x: &[T]| -> Result<Option<Lu<T>>> {
        if cfg.strategy == Strategy::FixedPoint {
            return Ok(None);
        }
        let jac = match cfg.jacobian {
            JacobianKind::FiniteDifference => fd_jacobian(g, x),
            JacobianKind::ForwardSensitivity => ad_jacobian(g, x),
        };
        Lu::factor(jac).map(Some).ok_or(Error::NonConvergence {
            iterations: 0,
            residual: f64::INFINITY,
        })
    };
    let mut lu = factor(&x)?;
    let eps = x[0].epsilon();
    let mut residual = f64::INFINITY;
    for it in 0..cfg.max_iterations {
        let r = g.eval(&x);
        let previous = residual;
        residual = max_magnitude(&r);
        if residual <= cfg.tolerance {
            return Ok(Solution {
                x,
                iterations: it,
                residual,
            });
        }
        if !residual.is_finite() {
            break;
        }
        if it > 0 && lu.is_some() {
            // refactor on slow contraction, or when the current rate cannot
            // reach the tolerance within the remaining iterations
            let rate = residual / previous;
            let left = (cfg.max_iterations - it) as i32;
            if rate > 0.25 || residual * rate.powi(left / 2) > cfg.tolerance {
                lu = factor(&x)?;
            }
        }
        let delta = match &lu {
            Some(lu) => lu.solve(r),
            None => {
                let s = x[0].cst(fixed_point_scale);
                r.into_iter().map(|ri| s.clone() * ri).collect()
            }
        };
        let step = max_magnitude(&delta);
        x = x.into_iter().zip(delta).map(|(a, d)| a - d).collect();
        if step <= 8.0 * eps * max_magnitude(&x).max(1.0) {
            return Ok(Solution {
                residual: max_magnitude(&g.eval(&x)),
                x,
                iterations: it + 1,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iterations,
        residual,
    })
}

/// One-sided differences of G at the value part of `x`.
fn fd_jacobian<T: Real, G: Residual<T>>(g: &G, x: &[T]) -> Vec<Vec<T>> {
    let n = x.len();
    let base: Vec<T> = x.iter().map(Real::value).collect();
    let g0: Vec<T> = g.eval(&base).iter().map(Real::value).collect();
    let sqrt_eps = x[0].epsilon().sqrt();
    let mut jac = vec![Vec::with_capacity(n); g0.len()];
    for j in 0..n {
        let delta = sqrt_eps * base[j].to_f64().abs().max(1.0);
        let mut xp = base.clone();
        xp[j] = xp[j].clone() + xp[j].cst(delta);
        // use the representable step
        let dx = xp[j].clone() - base[j].clone();
        let gp = g.eval(&xp);
        for (i, row) in jac.iter_mut().enumerate() {
            row.push(((gp[i].value() - g0[i].clone()) / dx.clone()).value());
        }
    }
    jac
}

/// Jacobian by propagating a tangent basis through G.
fn ad_jacobian<T: Real, G: Residual<T>>(g: &G, x: &[T]) -> Vec<Vec<T>> {
    let n = x.len();
    let seeded: Vec<Dual<T>> = x
        .iter()
        .enumerate()
        .map(|(i, xi)| Dual::variable(xi.value(), i, n))
        .collect();
    g.eval_dual(&seeded)
        .into_iter()
        .map(|gi| (0..n).map(|j| gi.tangent(j).value()).collect())
        .collect()
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Vec<Vec<T>>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(mut a: Vec<Vec<T>>) -> Option<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i][k].to_f64().abs().total_cmp(&a[j][k].to_f64().abs()))?;
            if a[p][k].to_f64() == 0.0 {
                return None;
            }
            a.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..n {
                let factor = a[i][k].clone() / a[k][k].clone();
                for j in k + 1..n {
                    let t = factor.clone() * a[k][j].clone();
                    a[i][j] = a[i][j].clone() - t;
                }
                a[i][k] = factor;
            }
        }
        Some(Lu { lu: a, perm })
    }

    /// Solves A x = b for any right-hand side type built on `T`'s values.
    pub fn solve(&self, b: Vec<T>) -> Vec<T> {
        let n = self.lu.len();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[i][j].clone() * x[j].clone();
                x[i] = x[i].clone() - t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[i][j].clone() * x[j].clone();
                x[i] = x[i].clone() - t;
            }
            x[i] = x[i].clone() / self.lu[i][i].clone();
        }
        x
    }
}
