//! One-step maps: tableau-driven Runge–Kutta and the direct extended phase
//! space algorithms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::problem::VectorField;
use super::real::{add, axpy, sub, Coeff, Real};
use super::solver::{solve, Residual, SolverConfig};
use crate::error::{Error, Result};
use crate::exactnum::{Scalar, Scheme};
use crate::tableau::{
    alternating_substeps, midpoint_projection_tableau, monoimplicit_decompose, monoimplicit_tableau,
    ButcherTableau, CompositionCoefficients,
};

#[derive(Debug, Clone)]
pub struct StepOutput<T> {
    pub z: Vec<T>,
    /// Nonlinear iterations used (0 for explicit maps).
    pub iterations: usize,
}

fn coeffs(xs: &[Scalar], bits: u32) -> Vec<Coeff> {
    xs.iter().map(|x| Coeff::new(x, bits)).collect()
}

fn coeff_matrix(a: &[Vec<Scalar>], bits: u32) -> Vec<Vec<Coeff>> {
    a.iter().map(|row| coeffs(row, bits)).collect()
}

fn check_dim<T>(f: &impl VectorField, z: &[T]) -> Result<()> {
    if z.len() != f.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            got: z.len(),
        });
    }
    Ok(())
}

/// z + h Σ bⱼ kⱼ.
fn update<R: Real>(z: &[R], h: &R, b: &[Coeff], k: &[Vec<R>]) -> Vec<R> {
    let mut out = z.to_vec();
    for (bj, kj) in b.iter().zip(k) {
        if !bj.is_zero() {
            out = axpy(&out, &(h.clone() * h.coeff(bj)), kj);
        }
    }
    out
}

/// Strictly lower triangular A: stages evaluated in sequence.
#[derive(Debug, Clone)]
pub struct ExplicitRk {
    a: Vec<Vec<Coeff>>,
    b: Vec<Coeff>,
}

impl ExplicitRk {
    pub fn new(tab: &ButcherTableau, bits: u32) -> Result<Self> {
        if !tab.is_explicit() {
            return Err(Error::Invalid("tableau is not explicit".into()));
        }
        Ok(ExplicitRk {
            a: coeff_matrix(tab.a(), bits),
            b: coeffs(tab.b(), bits),
        })
    }

    fn step<T: Real, F: VectorField>(&self, f: &F, z: &[T], h: &T) -> Vec<T> {
        let mut k: Vec<Vec<T>> = Vec::with_capacity(self.b.len());
        for row in &self.a {
            let mut zi = z.to_vec();
            for (aij, kj) in row.iter().zip(&k) {
                if !aij.is_zero() {
                    zi = axpy(&zi, &(h.clone() * h.coeff(aij)), kj);
                }
            }
            k.push(f.eval(&zi));
        }
        update(z, h, &self.b, &k)
    }
}

/// A = L + ¼uvᵀ: a single implicit unknown w = ¼ Σⱼ vⱼ kⱼ of the state's
/// dimension; given w the stages follow in sequence through L.
#[derive(Debug, Clone)]
pub struct MonoimplicitRk {
    l: Vec<Vec<Coeff>>,
    u: Vec<Coeff>,
    quarter_v: Vec<Coeff>,
    b: Vec<Coeff>,
    solver: SolverConfig,
}

impl MonoimplicitRk {
    pub fn new(tab: &ButcherTableau, bits: u32, solver: SolverConfig) -> Result<Self> {
        solver.validate()?;
        let form = monoimplicit_decompose(tab)?;
        let quarter = Scalar::ratio(1, 4);
        let quarter_v: Vec<Scalar> = form.v.iter().map(|x| &quarter * x).collect();
        Ok(MonoimplicitRk {
            l: coeff_matrix(&form.l, bits),
            u: coeffs(&form.u, bits),
            quarter_v: coeffs(&quarter_v, bits),
            b: coeffs(&form.b, bits),
            solver,
        })
    }

    fn step<T: Real, F: VectorField>(&self, f: &F, z: &[T], h: &T) -> Result<StepOutput<T>> {
        let sys = MonoSystem { st: self, f, z, h };
        let w0 = vec![z[0].zero_like(); z.len()];
        let sol = solve(&sys, w0, &self.solver, 1.0)?;
        let k = sys.stages(&sol.x, &|t: &T| t.clone());
        Ok(StepOutput {
            z: update(z, h, &self.b, &k),
            iterations: sol.iterations,
        })
    }
}

struct MonoSystem<'a, F, T> {
    st: &'a MonoimplicitRk,
    f: &'a F,
    z: &'a [T],
    h: &'a T,
}

impl<F: VectorField, T: Real> MonoSystem<'_, F, T> {
    fn stages<R: Real>(&self, w: &[R], lift: &dyn Fn(&T) -> R) -> Vec<Vec<R>> {
        let z: Vec<R> = self.z.iter().map(lift).collect();
        let h = lift(self.h);
        let mut k: Vec<Vec<R>> = Vec::with_capacity(self.st.b.len());
        for (row, ui) in self.st.l.iter().zip(&self.st.u) {
            let mut zi = z.clone();
            for (lij, kj) in row.iter().zip(&k) {
                if !lij.is_zero() {
                    zi = axpy(&zi, &(h.clone() * h.coeff(lij)), kj);
                }
            }
            if !ui.is_zero() {
                zi = axpy(&zi, &(h.clone() * h.coeff(ui)), w);
            }
            k.push(self.f.eval(&zi));
        }
        k
    }
}

impl<F: VectorField, T: Real> Residual<T> for MonoSystem<'_, F, T> {
    fn eval_in<R: Real>(&self, w: &[R], lift: &dyn Fn(&T) -> R) -> Vec<R> {
        let k = self.stages(w, lift);
        let mut g = w.to_vec();
        for (vj, kj) in self.st.quarter_v.iter().zip(&k) {
            if !vj.is_zero() {
                g = axpy(&g, &(-w[0].coeff(vj)), kj);
            }
        }
        g
    }
}

/// General implicit tableau: all stage slopes solved together.
#[derive(Debug, Clone)]
pub struct ImplicitRk {
    a: Vec<Vec<Coeff>>,
    b: Vec<Coeff>,
    solver: SolverConfig,
}

impl ImplicitRk {
    pub fn new(tab: &ButcherTableau, bits: u32, solver: SolverConfig) -> Result<Self> {
        solver.validate()?;
        Ok(ImplicitRk {
            a: coeff_matrix(tab.a(), bits),
            b: coeffs(tab.b(), bits),
            solver,
        })
    }

    fn step<T: Real, F: VectorField>(&self, f: &F, z: &[T], h: &T) -> Result<StepOutput<T>> {
        let d = z.len();
        let sys = StageSystem { st: self, f, z, h };
        let f0 = f.eval(z);
        let k0: Vec<T> = (0..self.b.len()).flat_map(|_| f0.iter().cloned()).collect();
        let sol = solve(&sys, k0, &self.solver, 1.0)?;
        let k: Vec<Vec<T>> = sol.x.chunks(d).map(<[T]>::to_vec).collect();
        Ok(StepOutput {
            z: update(z, h, &self.b, &k),
            iterations: sol.iterations,
        })
    }
}

struct StageSystem<'a, F, T> {
    st: &'a ImplicitRk,
    f: &'a F,
    z: &'a [T],
    h: &'a T,
}

impl<F: VectorField, T: Real> Residual<T> for StageSystem<'_, F, T> {
    fn eval_in<R: Real>(&self, x: &[R], lift: &dyn Fn(&T) -> R) -> Vec<R> {
        let d = self.z.len();
        let z: Vec<R> = self.z.iter().map(lift).collect();
        let h = lift(self.h);
        let k: Vec<&[R]> = x.chunks(d).collect();
        let mut g = Vec::with_capacity(x.len());
        for (row, ki) in self.st.a.iter().zip(&k) {
            let mut zi = z.clone();
            for (aij, kj) in row.iter().zip(&k) {
                if !aij.is_zero() {
                    zi = axpy(&zi, &(h.clone() * h.coeff(aij)), kj);
                }
            }
            g.extend(sub(ki, &self.f.eval(&zi)));
        }
        g
    }
}

/// π ∘ ∏ Φ_{αᵢh} on the duplicated system ż = f(ẑ), dẑ/dt = f(z), with
/// Φ = (½ on z)(1 on ẑ)(½ on z) and π the average of the two copies.
#[derive(Debug, Clone)]
pub struct MidpointExt {
    alphas: Vec<Coeff>,
    halves: Vec<Coeff>,
}

impl MidpointExt {
    pub fn new(alphas: &CompositionCoefficients, bits: u32) -> Result<Self> {
        alphas.check_unit_sum()?;
        let half = Scalar::ratio(1, 2);
        let halves: Vec<Scalar> = alphas.as_slice().iter().map(|a| &half * a).collect();
        Ok(MidpointExt {
            alphas: coeffs(alphas.as_slice(), bits),
            halves: coeffs(&halves, bits),
        })
    }

    fn step<T: Real, F: VectorField>(&self, f: &F, z: &[T], h: &T) -> Vec<T> {
        let mut base = z.to_vec();
        let mut dup = z.to_vec();
        for (alpha, half) in self.alphas.iter().zip(&self.halves) {
            let hh = h.clone() * h.coeff(half);
            base = axpy(&base, &hh, &f.eval(&dup));
            dup = axpy(&dup, &(h.clone() * h.coeff(alpha)), &f.eval(&base));
            base = axpy(&base, &hh, &f.eval(&dup));
        }
        let half = z[0].cst(0.5);
        add(&base, &dup).into_iter().map(|x| half.clone() * x).collect()
    }
}

/// Symmetric projection: start the copies at z + μ and z − μ, run the
/// alternating flows a₁ (on z), a₂ (on ẑ), …, shift back by ±μ and choose μ
/// so both copies coincide.
#[derive(Debug, Clone)]
pub struct SymmetricProjection {
    weights: Vec<Coeff>,
    solver: SolverConfig,
}

impl SymmetricProjection {
    pub fn new(alist: &CompositionCoefficients, bits: u32, solver: SolverConfig) -> Result<Self> {
        alist.check_alternating()?;
        solver.validate()?;
        Ok(SymmetricProjection {
            weights: coeffs(alist.as_slice(), bits),
            solver,
        })
    }

    fn step<T: Real, F: VectorField>(&self, f: &F, z: &[T], h: &T) -> Result<StepOutput<T>> {
        let sys = ShiftSystem { st: self, f, z, h };
        let mu0 = vec![z[0].zero_like(); z.len()];
        let sol = solve(&sys, mu0, &self.solver, 0.25)?;
        let (base, dup) = sys.shifted_ends(&sol.x, &|t: &T| t.clone());
        let half = z[0].cst(0.5);
        Ok(StepOutput {
            z: add(&base, &dup).into_iter().map(|x| half.clone() * x).collect(),
            iterations: sol.iterations,
        })
    }
}

struct ShiftSystem<'a, F, T> {
    st: &'a SymmetricProjection,
    f: &'a F,
    z: &'a [T],
    h: &'a T,
}

impl<F: VectorField, T: Real> ShiftSystem<'_, F, T> {
    /// (z-copy end + μ, ẑ-copy end − μ).
    fn shifted_ends<R: Real>(&self, mu: &[R], lift: &dyn Fn(&T) -> R) -> (Vec<R>, Vec<R>) {
        let z: Vec<R> = self.z.iter().map(lift).collect();
        let h = lift(self.h);
        let mut base = add(&z, mu);
        let mut dup = sub(&z, mu);
        for (i, a) in self.st.weights.iter().enumerate() {
            let ha = h.clone() * h.coeff(a);
            if i % 2 == 0 {
                base = axpy(&base, &ha, &self.f.eval(&dup));
            } else {
                dup = axpy(&dup, &ha, &self.f.eval(&base));
            }
        }
        (add(&base, mu), sub(&dup, mu))
    }
}

impl<F: VectorField, T: Real> Residual<T> for ShiftSystem<'_, F, T> {
    fn eval_in<R: Real>(&self, mu: &[R], lift: &dyn Fn(&T) -> R) -> Vec<R> {
        let (base, dup) = self.shifted_ends(mu, lift);
        sub(&base, &dup)
    }
}

#[derive(Debug, Clone)]
pub enum AnyStepper {
    Explicit(ExplicitRk),
    Monoimplicit(MonoimplicitRk),
    Implicit(ImplicitRk),
    MidpointExt(MidpointExt),
    SymmetricProjection(SymmetricProjection),
}

impl AnyStepper {
    /// Tableau stepper on the cheapest applicable path: explicit,
    /// monoimplicit, or fully implicit.
    pub fn from_tableau(tab: &ButcherTableau, bits: u32, solver: SolverConfig) -> Result<Self> {
        if tab.is_explicit() {
            return Ok(AnyStepper::Explicit(ExplicitRk::new(tab, bits)?));
        }
        match MonoimplicitRk::new(tab, bits, solver) {
            Ok(m) => Ok(AnyStepper::Monoimplicit(m)),
            Err(Error::NotMonoimplicit(_)) => Ok(AnyStepper::Implicit(ImplicitRk::new(tab, bits, solver)?)),
            Err(e) => Err(e),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AnyStepper::Explicit(_) => "explicit-rk",
            AnyStepper::Monoimplicit(_) => "monoimplicit-rk",
            AnyStepper::Implicit(_) => "implicit-rk",
            AnyStepper::MidpointExt(_) => "midpoint-extended",
            AnyStepper::SymmetricProjection(_) => "symmetric-projection",
        }
    }

    pub fn solver(&self) -> Option<&SolverConfig> {
        match self {
            AnyStepper::Monoimplicit(m) => Some(&m.solver),
            AnyStepper::Implicit(m) => Some(&m.solver),
            AnyStepper::SymmetricProjection(m) => Some(&m.solver),
            _ => None,
        }
    }

    pub fn step<T: Real, F: VectorField>(&self, f: &F, z: &[T], h: &T) -> Result<StepOutput<T>> {
        check_dim(f, z)?;
        let explicit = |z: Vec<T>| Ok(StepOutput { z, iterations: 0 });
        match self {
            AnyStepper::Explicit(s) => explicit(s.step(f, z, h)),
            AnyStepper::MidpointExt(s) => explicit(s.step(f, z, h)),
            AnyStepper::Monoimplicit(s) => s.step(f, z, h),
            AnyStepper::Implicit(s) => s.step(f, z, h),
            AnyStepper::SymmetricProjection(s) => s.step(f, z, h),
        }
    }
}

/// Named ways of turning a composition scheme into a stepper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Direct midpoint projection on the duplicated system.
    Midpoint,
    /// Explicit tableau of the midpoint projection.
    MidpointRk,
    /// Direct symmetric projection with the μ solve.
    Symmetric,
    /// Monoimplicit tableau of the symmetric projection.
    Monoimplicit,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Midpoint, Method::MidpointRk, Method::Symmetric, Method::Monoimplicit];

    pub fn name(self) -> &'static str {
        match self {
            Method::Midpoint => "midpoint",
            Method::MidpointRk => "midpoint-rk",
            Method::Symmetric => "symmetric",
            Method::Monoimplicit => "monoimplicit",
        }
    }

    /// Uses the leapfrog fractions (midpoint kinds) or the merged
    /// alternating weights (symmetric kinds) of `scheme`.
    pub fn coefficients(self, scheme: Scheme) -> CompositionCoefficients {
        match self {
            Method::Midpoint | Method::MidpointRk => CompositionCoefficients::leapfrog_fractions(scheme),
            Method::Symmetric | Method::Monoimplicit => CompositionCoefficients::alternating(scheme),
        }
    }

    pub fn stepper(self, coeffs: &CompositionCoefficients, bits: u32, solver: SolverConfig) -> Result<AnyStepper> {
        match self {
            Method::Midpoint => Ok(AnyStepper::MidpointExt(MidpointExt::new(coeffs, bits)?)),
            Method::MidpointRk => Ok(AnyStepper::Explicit(ExplicitRk::new(
                &midpoint_projection_tableau(coeffs)?,
                bits,
            )?)),
            Method::Symmetric => Ok(AnyStepper::SymmetricProjection(SymmetricProjection::new(
                coeffs, bits, solver,
            )?)),
            Method::Monoimplicit => Ok(AnyStepper::Monoimplicit(MonoimplicitRk::new(
                &monoimplicit_tableau(coeffs)?,
                bits,
                solver,
            )?)),
        }
    }

    pub fn for_scheme(self, scheme: Scheme, bits: u32, solver: SolverConfig) -> Result<AnyStepper> {
        self.stepper(&self.coefficients(scheme), bits, solver)
    }

    /// The substep list handed to [`Method::stepper`] from leapfrog fractions.
    pub fn coefficients_from_fractions(self, alphas: &[Scalar]) -> CompositionCoefficients {
        match self {
            Method::Midpoint | Method::MidpointRk => CompositionCoefficients::new(alphas.to_vec()),
            Method::Symmetric | Method::Monoimplicit => CompositionCoefficients::new(alternating_substeps(alphas)),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::problem::Problem;
    use crate::integrate::real::Dual;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn euler_on_zero_field() {
        let zero = Problem::linear(vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        let s = AnyStepper::from_tableau(&ButcherTableau::explicit_euler(), 53, SolverConfig::default()).unwrap();
        assert_eq!(s.step(&zero, &[0.3, -0.7], &0.1).unwrap().z, vec![0.3, -0.7]);
        for m in Method::ALL {
            let st = m.for_scheme(Scheme::TripleJump4, 53, SolverConfig::default()).unwrap();
            assert_eq!(st.step(&zero, &[0.3, -0.7], &0.1).unwrap().z, vec![0.3, -0.7], "{m}");
        }
    }

    #[test]
    fn three_stage_on_exponential() {
        // k₁ = 1, k₂ = 1 + h/2, k₃ = 1 + h k₂
        let lin = Problem::linear(vec![vec![1.0]]);
        let h = 0.1;
        let k1 = 1.0;
        let k2 = 1.0 + 0.5 * h * k1;
        let k3 = 1.0 + h * k2;
        let expected = 1.0 + h * (0.25 * k1 + 0.5 * k2 + 0.25 * k3);
        let st = Method::MidpointRk.for_scheme(Scheme::Leapfrog2, 53, SolverConfig::default()).unwrap();
        let got = st.step(&lin, &[1.0], &h).unwrap().z[0];
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn dimension_checked() {
        let st = Method::Midpoint.for_scheme(Scheme::Leapfrog2, 53, SolverConfig::default()).unwrap();
        assert!(matches!(
            st.step(&Problem::harmonic(), &[1.0], &0.1),
            Err(Error::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn path_selection() {
        let cfg = SolverConfig::default();
        let mono = monoimplicit_tableau(&CompositionCoefficients::new(vec![q(1, 1), q(1, 1)])).unwrap();
        assert_eq!(AnyStepper::from_tableau(&mono, 53, cfg).unwrap().name(), "monoimplicit-rk");
        let lobatto = ButcherTableau::new(
            vec![
                vec![q(1, 6), q(-1, 3), q(1, 6)],
                vec![q(1, 6), q(5, 12), q(-1, 12)],
                vec![q(1, 6), q(2, 3), q(1, 6)],
            ],
            vec![q(1, 6), q(2, 3), q(1, 6)],
        )
        .unwrap();
        let st = AnyStepper::from_tableau(&lobatto, 53, cfg).unwrap();
        assert_eq!(st.name(), "implicit-rk");
        // both implicit paths agree with each other on the same monoimplicit tableau
        let full = AnyStepper::Implicit(ImplicitRk::new(&mono, 53, cfg).unwrap());
        let fast = AnyStepper::from_tableau(&mono, 53, cfg).unwrap();
        let p = Problem::nonseparable();
        let a = full.step(&p, &[0.4, 0.3], &0.1).unwrap().z;
        let b = fast.step(&p, &[0.4, 0.3], &0.1).unwrap().z;
        assert!((a[0] - b[0]).abs() < 1e-13 && (a[1] - b[1]).abs() < 1e-13);
    }

    #[test]
    fn harmonic_quadratic_invariant_one_step() {
        let st = Method::Monoimplicit.for_scheme(Scheme::Leapfrog2, 53, SolverConfig::default()).unwrap();
        let z = st.step(&Problem::harmonic(), &[0.6, 0.8], &0.1).unwrap().z;
        assert!((z[0] * z[0] + z[1] * z[1] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn steps_run_on_duals() {
        let st = Method::Symmetric.for_scheme(Scheme::Leapfrog2, 53, SolverConfig::default()).unwrap();
        let z = vec![Dual::variable(0.4, 0, 2), Dual::variable(0.2, 1, 2)];
        let out = st.step(&Problem::nonseparable(), &z, &Dual::constant(0.1)).unwrap();
        assert_eq!(out.z[0].d.len(), 2);
    }
}
