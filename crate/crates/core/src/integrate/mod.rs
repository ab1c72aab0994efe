//! Numerical integration: steppers, test problems, and the defect and
//! energy-drift experiments.

mod problem;
mod real;
mod solver;
mod stepper;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use problem::{builtin_problems, AffineConjugate, Field, PolynomialField, Problem, VectorField, BUILTIN_NAMES};
pub use real::{lift, max_magnitude, Coeff, Dual, Real};
pub use solver::{solve, JacobianKind, Lu, Residual, Solution, SolverConfig, Strategy};
pub use stepper::{
    AnyStepper, ExplicitRk, ImplicitRk, Method, MidpointExt, MonoimplicitRk, StepOutput, SymmetricProjection,
};

use crate::error::{Error, Result};
use crate::exactnum::{check_precision, MpFloat, DEFAULT_PRECISION};

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub h: f64,
    /// Steps between recorded samples.
    pub stride: usize,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// H(zₙ) − H(z₀); empty without a Hamiltonian.
    pub energy_error: Vec<f64>,
    /// zₙᵀCzₙ − z₀ᵀCz₀; empty without a quadratic invariant.
    pub quadratic_error: Vec<f64>,
    /// Solver iterations of the step ending at each sample.
    pub iterations: Vec<usize>,
}

/// Applies the stepper `n_steps` times, sampling every `stride` steps
/// (and always the initial state).
pub fn integrate<T: Real>(
    stepper: &AnyStepper,
    problem: &Problem,
    z0: &[T],
    h: &T,
    n_steps: usize,
    stride: usize,
) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(Error::Invalid("n_steps must be at least 1".into()));
    }
    let stride = stride.max(1);
    let h0 = problem.hamiltonian(z0);
    let c0 = problem.quadratic_value(z0);
    let mut traj = Trajectory {
        h: h.to_f64(),
        stride,
        times: Vec::new(),
        states: Vec::new(),
        energy_error: Vec::new(),
        quadratic_error: Vec::new(),
        iterations: Vec::new(),
    };
    let mut record = |n: usize, z: &[T], iterations: usize| {
        traj.times.push(n as f64 * h.to_f64());
        traj.states.push(z.iter().map(Real::to_f64).collect());
        if let (Some(e0), Some(e)) = (&h0, problem.hamiltonian(z)) {
            traj.energy_error.push((e - e0.clone()).to_f64());
        }
        if let (Some(q0), Some(q)) = (&c0, problem.quadratic_value(z)) {
            traj.quadratic_error.push((q - q0.clone()).to_f64());
        }
        traj.iterations.push(iterations);
    };
    record(0, z0, 0);
    let mut z = z0.to_vec();
    for n in 1..=n_steps {
        let out = stepper.step(problem, &z, h).map_err(|e| Error::AtStep {
            step: n,
            source: Box::new(e),
        })?;
        z = out.z;
        if n % stride == 0 || n == n_steps {
            record(n, &z, out.iterations);
        }
    }
    Ok(traj)
}

/// ‖DᵀJD − J‖∞ for the one-step Jacobian D at z, obtained by propagating a
/// full tangent basis through the stepper's own arithmetic.
pub fn symplectic_defect<T: Real>(stepper: &AnyStepper, problem: &Problem, z: &[T], h: &T) -> Result<f64> {
    let j = problem
        .symplectic_structure
        .as_ref()
        .ok_or(Error::MissingStructure("symplectic structure"))?;
    let d = one_step_jacobian(stepper, problem, z, h)?;
    let n = z.len();
    let jt: Vec<Vec<T>> = j.iter().map(|row| row.iter().map(|&x| z[0].cst(x)).collect()).collect();
    let mut worst = 0f64;
    for a in 0..n {
        for b in 0..n {
            let mut acc = z[0].zero_like();
            for k in 0..n {
                for l in 0..n {
                    if j[k][l] != 0.0 {
                        acc = acc + d[k][a].clone() * jt[k][l].clone() * d[l][b].clone();
                    }
                }
            }
            worst = worst.max((acc - jt[a][b].clone()).magnitude());
        }
    }
    Ok(worst)
}

/// ∂φ_h(z)/∂z by forward sensitivity.
pub fn one_step_jacobian<T: Real>(stepper: &AnyStepper, problem: &Problem, z: &[T], h: &T) -> Result<Vec<Vec<T>>> {
    let n = z.len();
    let seeded: Vec<Dual<T>> = z
        .iter()
        .enumerate()
        .map(|(i, zi)| Dual::variable(zi.clone(), i, n))
        .collect();
    let out = stepper.step(problem, &seeded, &Dual::constant(h.clone()))?;
    Ok(out.z.iter().map(|zi| (0..n).map(|j| zi.tangent(j)).collect()).collect())
}

/// ‖φ_h(φ_{−h}(z)) − z‖∞.
pub fn symmetry_defect<T: Real, F: VectorField>(stepper: &AnyStepper, f: &F, z: &[T], h: &T) -> Result<f64> {
    let back = stepper.step(f, z, &-h.clone())?.z;
    let there = stepper.step(f, &back, h)?.z;
    Ok(there
        .into_iter()
        .zip(z)
        .map(|(a, b)| (a - b.clone()).magnitude())
        .fold(0.0, f64::max))
}

/// Least-squares line y = slope·x + intercept; also returns the largest
/// absolute residual.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_resid = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).abs())
        .fold(0.0, f64::max);
    Some((slope, intercept, max_resid))
}

/// Slope of log(value) against log(h) over the positive values.
pub fn loglog_slope(hs: &[f64], values: &[f64]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = hs
        .iter()
        .zip(values)
        .filter(|(h, v)| **h > 0.0 && **v > 0.0 && v.is_finite())
        .map(|(h, v)| (h.ln(), v.ln()))
        .unzip();
    linear_fit(&x, &y).map(|(s, _, _)| s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monitored {
    Energy,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftOptions {
    pub t_final: f64,
    pub precision_bits: u32,
    pub monitored: Monitored,
    /// Fraction of [0, T] discarded before fitting.
    pub transient: f64,
}

impl DriftOptions {
    pub fn energy(t_final: f64, precision_bits: u32) -> Self {
        DriftOptions {
            t_final,
            precision_bits,
            monitored: Monitored::Energy,
            transient: 0.1,
        }
    }

    pub fn quadratic(t_final: f64, precision_bits: u32) -> Self {
        DriftOptions {
            monitored: Monitored::Quadratic,
            ..DriftOptions::energy(t_final, precision_bits)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftRate {
    pub h: f64,
    pub steps: usize,
    /// Fitted slope of the monitored error against t.
    pub rate: f64,
    /// Smallest |rate| distinguishable from roundoff, solver residuals and
    /// bounded oscillation: the roundoff bound or three batch-means standard
    /// errors of the slope, whichever is larger.
    pub floor: f64,
    pub resolved: bool,
    /// Largest deviation from the fitted line.
    pub fluctuation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftFit {
    pub monitored: Monitored,
    pub t_final: f64,
    pub precision_bits: u32,
    pub rates: Vec<DriftRate>,
    /// log-log slope of |rate| against h over the resolved rates.
    pub slope: Option<f64>,
    pub warning: Option<String>,
}

/// Runs each h to `t_final`, fits the monitored error against t after the
/// transient, and fits log|rate| against log h.
///
/// The stepper's coefficients should be cached at `precision_bits`.
pub fn drift_fit(
    stepper: &AnyStepper,
    problem: &Problem,
    z0: &[f64],
    h_list: &[f64],
    opts: &DriftOptions,
) -> Result<DriftFit> {
    if h_list.len() < 3 {
        return Err(Error::Invalid("drift fits need at least three step sizes".into()));
    }
    if h_list.iter().any(|&h| !(h > 0.0)) || !(opts.t_final > 0.0) {
        return Err(Error::Invalid("step sizes and T must be positive".into()));
    }
    match opts.monitored {
        Monitored::Energy if !problem.has_hamiltonian() => return Err(Error::MissingStructure("Hamiltonian")),
        Monitored::Quadratic if problem.quadratic_invariant.is_none() => {
            return Err(Error::MissingStructure("quadratic invariant"))
        }
        _ => {}
    }
    let bits = check_precision(opts.precision_bits)?;
    let rates = h_list
        .par_iter()
        .map(|&h| {
            if bits == DEFAULT_PRECISION {
                drift_rate(stepper, problem, &lift(&0.0, z0), &h, opts)
            } else {
                let like = MpFloat::zero(bits);
                drift_rate(stepper, problem, &lift(&like, z0), &like.cst(h), opts)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let resolved: Vec<&DriftRate> = rates.iter().filter(|r| r.resolved).collect();
    let slope = if resolved.len() >= 2 {
        loglog_slope(
            &resolved.iter().map(|r| r.h).collect::<Vec<_>>(),
            &resolved.iter().map(|r| r.rate.abs()).collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let unresolved: Vec<String> = rates.iter().filter(|r| !r.resolved).map(|r| r.h.to_string()).collect();
    let warning = (!unresolved.is_empty()).then(|| {
        format!(
            "drift indistinguishable from noise for h = {}; raise precision_bits or T to resolve it",
            unresolved.join(", ")
        )
    });
    Ok(DriftFit {
        monitored: opts.monitored,
        t_final: opts.t_final,
        precision_bits: bits,
        rates,
        slope,
        warning,
    })
}

fn drift_rate<T: Real>(stepper: &AnyStepper, problem: &Problem, z0: &[T], h: &T, opts: &DriftOptions) -> Result<DriftRate> {
    let hf = h.to_f64();
    let steps = (opts.t_final / hf).round() as usize;
    let monitor = |z: &[T]| match opts.monitored {
        Monitored::Energy => problem.hamiltonian(z),
        Monitored::Quadratic => problem.quadratic_value(z),
    };
    let q0 = monitor(z0).expect("monitored quantity checked by caller");
    let first = ((opts.transient * steps as f64).ceil() as usize).max(1);
    let mut ts = Vec::with_capacity(steps + 1 - first);
    let mut es = Vec::with_capacity(steps + 1 - first);
    let mut z = z0.to_vec();
    for n in 1..=steps {
        z = stepper
            .step(problem, &z, h)
            .map_err(|e| Error::AtStep {
                step: n,
                source: Box::new(e),
            })?
            .z;
        if n >= first {
            ts.push(n as f64 * hf);
            es.push((monitor(&z).expect("present") - q0.clone()).to_f64());
        }
    }
    let (rate, _, fluctuation) = linear_fit(&ts, &es).ok_or_else(|| Error::Invalid("too few steps to fit".into()))?;
    let tol = stepper.solver().map_or(0.0, |s| s.tolerance);
    let scale = q0.to_f64().abs().max(1.0);
    let roundoff_floor = 10.0 * z0[0].epsilon().max(tol) * scale / hf;
    let floor = roundoff_floor.max(3.0 * batch_slope_error(&ts, &es));
    Ok(DriftRate {
        h: hf,
        steps,
        rate,
        floor,
        resolved: rate.abs() > floor,
        fluctuation,
    })
}

const DRIFT_BATCHES: usize = 10;

/// Standard error of the fitted slope by batch means: the series is cut into
/// contiguous blocks whose means are nearly uncorrelated, and the slope
/// error is read off the scatter of the block means about their own line.
fn batch_slope_error(ts: &[f64], es: &[f64]) -> f64 {
    let len = ts.len() / DRIFT_BATCHES;
    if len == 0 {
        return f64::INFINITY;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (bt, be): (Vec<f64>, Vec<f64>) = (0..DRIFT_BATCHES)
        .map(|k| (mean(&ts[k * len..(k + 1) * len]), mean(&es[k * len..(k + 1) * len])))
        .unzip();
    let Some((slope, intercept, _)) = linear_fit(&bt, &be) else {
        return f64::INFINITY;
    };
    let tm = mean(&bt);
    let sxx: f64 = bt.iter().map(|t| (t - tm).powi(2)).sum();
    let sse: f64 = bt.iter().zip(&be).map(|(t, e)| (e - slope * t - intercept).powi(2)).sum();
    (sse / (DRIFT_BATCHES - 2) as f64 / sxx).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    Symplectic,
    Symmetry,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectScan {
    pub kind: DefectKind,
    pub precision_bits: u32,
    pub points: Vec<(f64, f64)>,
    pub slope: Option<f64>,
}

/// Defect at each h and the log-log slope.
pub fn defect_scan(
    stepper: &AnyStepper,
    problem: &Problem,
    z: &[f64],
    h_list: &[f64],
    kind: DefectKind,
    precision_bits: u32,
) -> Result<DefectScan> {
    let bits = check_precision(precision_bits)?;
    fn one<T: Real>(stepper: &AnyStepper, problem: &Problem, z: &[T], h: &T, kind: DefectKind) -> Result<f64> {
        match kind {
            DefectKind::Symplectic => symplectic_defect(stepper, problem, z, h),
            DefectKind::Symmetry => symmetry_defect(stepper, problem, z, h),
        }
    }
    let points = h_list
        .par_iter()
        .map(|&h| {
            let d = if bits == DEFAULT_PRECISION {
                one(stepper, problem, z, &h, kind)
            } else {
                let like = MpFloat::zero(bits);
                one(stepper, problem, &lift(&like, z), &like.cst(h), kind)
            }?;
            Ok((h, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let (hs, ds): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    Ok(DefectScan {
        kind,
        precision_bits: bits,
        slope: loglog_slope(&hs, &ds),
        points,
    })
}
