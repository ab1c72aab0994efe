//! Python bindings: tableau construction and analysis, steppers, and the
//! drift and defect experiments. Structured results come back as dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use projrk::analysis;
use projrk::cli::verify;
use projrk::exactnum::{composition_alphas, MpFloat, Scalar, Scheme, DEFAULT_PRECISION};
use projrk::integrate::{
    self, lift, AnyStepper, DefectKind, DriftOptions, Method, Problem, Real, SolverConfig,
};
use projrk::tableau::{
    midpoint_projection_tableau, monoimplicit_tableau, symmetric_projection_tableau, ButcherTableau,
    CompositionCoefficients,
};
use projrk::trees::enumerate_trees;

fn err(e: projrk::Error) -> PyErr {
    if e.is_non_convergence() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_dict(py: Python<'_>, value: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn scheme(name: &str) -> PyResult<Scheme> {
    name.parse().map_err(err)
}

fn fractions(scheme_name: &str, alphas: Option<Vec<String>>) -> PyResult<Vec<Scalar>> {
    match alphas {
        Some(list) => list.iter().map(|s| Scalar::parse(s).map_err(err)).collect(),
        None => Ok(composition_alphas(scheme(scheme_name)?)),
    }
}

/// An exact Butcher tableau.
#[pyclass(name = "Tableau", module = "projrk_py", frozen)]
struct PyTableau {
    inner: ButcherTableau,
}

#[pymethods]
impl PyTableau {
    /// Explicit tableau of the midpoint projection.
    #[staticmethod]
    #[pyo3(signature = (scheme="leapfrog2", alphas=None))]
    fn midpoint(scheme: &str, alphas: Option<Vec<String>>) -> PyResult<Self> {
        let c = CompositionCoefficients::new(fractions(scheme, alphas)?);
        Ok(PyTableau {
            inner: midpoint_projection_tableau(&c).map_err(err)?,
        })
    }

    /// Symmetric projection tableau, by eliminating the constraint.
    #[staticmethod]
    #[pyo3(signature = (scheme="leapfrog2", alphas=None))]
    fn symmetric(scheme: &str, alphas: Option<Vec<String>>) -> PyResult<Self> {
        let c = Method::Symmetric.coefficients_from_fractions(&fractions(scheme, alphas)?);
        Ok(PyTableau {
            inner: symmetric_projection_tableau(&c).map_err(err)?,
        })
    }

    /// Symmetric projection tableau from the closed-form monoimplicit formula.
    #[staticmethod]
    #[pyo3(signature = (scheme="leapfrog2", alphas=None))]
    fn monoimplicit(scheme: &str, alphas: Option<Vec<String>>) -> PyResult<Self> {
        let c = Method::Monoimplicit.coefficients_from_fractions(&fractions(scheme, alphas)?);
        Ok(PyTableau {
            inner: monoimplicit_tableau(&c).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyTableau { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn stages(&self) -> usize {
        self.inner.stages()
    }

    /// A as exact strings.
    #[getter]
    fn a(&self) -> Vec<Vec<String>> {
        self.inner.a().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }

    #[getter]
    fn b(&self) -> Vec<String> {
        self.inner.b().iter().map(|x| x.to_string()).collect()
    }

    #[getter]
    fn c(&self) -> Vec<String> {
        self.inner.c().iter().map(|x| x.to_string()).collect()
    }

    fn a_float(&self) -> Vec<Vec<f64>> {
        self.inner.a().iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect()
    }

    fn b_float(&self) -> Vec<f64> {
        self.inner.b().iter().map(Scalar::to_f64).collect()
    }

    fn is_explicit(&self) -> bool {
        self.inner.is_explicit()
    }

    fn is_symplectic(&self) -> bool {
        analysis::is_symplectic(&self.inner)
    }

    /// Full order report as a dict.
    #[pyo3(signature = (max_order=6))]
    fn analyze(&self, py: Python<'_>, max_order: usize) -> PyResult<Py<PyAny>> {
        let report = py.detach(|| analysis::analyze(&self.inner, max_order)).map_err(err)?;
        to_dict(py, &report)
    }

    fn pretty(&self) -> String {
        self.inner.pretty()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner.a() == other.inner.a() && self.inner.b() == other.inner.b()
    }

    fn __repr__(&self) -> String {
        format!("Tableau(stages={}, explicit={})", self.inner.stages(), self.inner.is_explicit())
    }
}

/// A one-step method at a fixed working precision.
#[pyclass(name = "Stepper", module = "projrk_py", frozen)]
struct PyStepper {
    inner: AnyStepper,
    bits: u32,
}

fn solver_config(tol: f64, max_iter: usize) -> PyResult<SolverConfig> {
    let cfg = SolverConfig {
        tolerance: tol,
        max_iterations: max_iter,
        ..SolverConfig::default()
    };
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

fn problem(name: &str) -> PyResult<Problem> {
    Problem::by_name(name).map_err(err)
}

#[pymethods]
impl PyStepper {
    /// `method` is one of midpoint, midpoint-rk, symmetric, monoimplicit.
    #[new]
    #[pyo3(signature = (method="midpoint", scheme="leapfrog2", precision=DEFAULT_PRECISION, tol=1e-12, max_iter=50))]
    fn new(method: &str, scheme: &str, precision: u32, tol: f64, max_iter: usize) -> PyResult<Self> {
        let m: Method = method.parse().map_err(err)?;
        let inner = m
            .for_scheme(self::scheme(scheme)?, precision, solver_config(tol, max_iter)?)
            .map_err(err)?;
        Ok(PyStepper { inner, bits: precision })
    }

    /// Stepper running the given tableau on its cheapest path.
    #[staticmethod]
    #[pyo3(signature = (tableau, precision=DEFAULT_PRECISION, tol=1e-12, max_iter=50))]
    fn from_tableau(tableau: &PyTableau, precision: u32, tol: f64, max_iter: usize) -> PyResult<Self> {
        let inner = AnyStepper::from_tableau(&tableau.inner, precision, solver_config(tol, max_iter)?).map_err(err)?;
        Ok(PyStepper { inner, bits: precision })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.name()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.bits
    }

    /// One step on a built-in problem; the state is rounded back to floats.
    fn step(&self, py: Python<'_>, problem_name: &str, z: Vec<f64>, h: f64) -> PyResult<Vec<f64>> {
        let p = problem(problem_name)?;
        py.detach(|| {
            if self.bits == DEFAULT_PRECISION {
                self.inner.step(&p, &z, &h).map(|o| o.z)
            } else {
                let like = MpFloat::zero(self.bits);
                self.inner
                    .step(&p, &lift(&like, &z), &like.cst(h))
                    .map(|o| o.z.iter().map(Real::to_f64).collect())
            }
        })
        .map_err(err)
    }

    /// Trajectory dict with times, states, energy and invariant errors.
    #[pyo3(signature = (problem_name, h, steps, z0=None, stride=1))]
    fn integrate(
        &self,
        py: Python<'_>,
        problem_name: &str,
        h: f64,
        steps: usize,
        z0: Option<Vec<f64>>,
        stride: usize,
    ) -> PyResult<Py<PyAny>> {
        let p = problem(problem_name)?;
        let z0 = z0.unwrap_or_else(|| p.z0.clone());
        let traj = py
            .detach(|| {
                if self.bits == DEFAULT_PRECISION {
                    integrate::integrate(&self.inner, &p, &z0, &h, steps, stride)
                } else {
                    let like = MpFloat::zero(self.bits);
                    integrate::integrate(&self.inner, &p, &lift(&like, &z0), &like.cst(h), steps, stride)
                }
            })
            .map_err(err)?;
        to_dict(py, &traj)
    }

    /// Drift rate per h and the log-log slope; `monitor` is energy or quadratic.
    #[pyo3(signature = (problem_name, h_list, t_final, z0=None, monitor="energy"))]
    fn drift(
        &self,
        py: Python<'_>,
        problem_name: &str,
        h_list: Vec<f64>,
        t_final: f64,
        z0: Option<Vec<f64>>,
        monitor: &str,
    ) -> PyResult<Py<PyAny>> {
        let p = problem(problem_name)?;
        let z0 = z0.unwrap_or_else(|| p.z0.clone());
        let opts = match monitor {
            "energy" => DriftOptions::energy(t_final, self.bits),
            "quadratic" => DriftOptions::quadratic(t_final, self.bits),
            other => return Err(PyValueError::new_err(format!("unknown monitor {other:?}"))),
        };
        let fit = py
            .detach(|| integrate::drift_fit(&self.inner, &p, &z0, &h_list, &opts))
            .map_err(err)?;
        to_dict(py, &fit)
    }

    /// Symplectic or symmetry defect per h and the log-log slope.
    #[pyo3(signature = (problem_name, h_list, z, kind="symplectic"))]
    fn defect_scan(
        &self,
        py: Python<'_>,
        problem_name: &str,
        h_list: Vec<f64>,
        z: Vec<f64>,
        kind: &str,
    ) -> PyResult<Py<PyAny>> {
        let p = problem(problem_name)?;
        let kind = match kind {
            "symplectic" => DefectKind::Symplectic,
            "symmetry" => DefectKind::Symmetry,
            other => return Err(PyValueError::new_err(format!("unknown defect kind {other:?}"))),
        };
        let scan = py
            .detach(|| integrate::defect_scan(&self.inner, &p, &z, &h_list, kind, self.bits))
            .map_err(err)?;
        to_dict(py, &scan)
    }

    fn __repr__(&self) -> String {
        format!("Stepper(kind={:?}, precision={})", self.inner.name(), self.bits)
    }
}

/// Substep fractions of a composition scheme as exact strings.
#[pyfunction]
fn scheme_alphas(name: &str) -> PyResult<Vec<String>> {
    Ok(composition_alphas(scheme(name)?).iter().map(|x| x.to_string()).collect())
}

/// Number of rooted trees of each order 1..=max_order.
#[pyfunction]
fn tree_counts(max_order: usize) -> PyResult<Vec<usize>> {
    Ok(enumerate_trees(max_order).map_err(err)?.counts())
}

/// Number of symplecticity conditions at each order 1..=k_max.
#[pyfunction]
fn condition_counts(k_max: usize) -> PyResult<Vec<usize>> {
    analysis::condition_counts(k_max).map_err(err)
}

/// The reproduction suite as a dict with one entry per check.
#[pyfunction]
#[pyo3(signature = (skip_numeric=true))]
fn verify_paper(py: Python<'_>, skip_numeric: bool) -> PyResult<Py<PyAny>> {
    let opts = verify::VerifyOptions {
        skip_numeric,
        ..verify::VerifyOptions::default()
    };
    let report = py.detach(|| verify::run(&opts));
    to_dict(py, &report)
}

#[pymodule]
fn projrk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTableau>()?;
    m.add_class::<PyStepper>()?;
    m.add_function(wrap_pyfunction!(scheme_alphas, m)?)?;
    m.add_function(wrap_pyfunction!(tree_counts, m)?)?;
    m.add_function(wrap_pyfunction!(condition_counts, m)?)?;
    m.add_function(wrap_pyfunction!(verify_paper, m)?)?;
    m.add("BUILTIN_PROBLEMS", integrate::BUILTIN_NAMES.to_vec())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
