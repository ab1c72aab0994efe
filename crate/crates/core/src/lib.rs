//! Runge–Kutta forms of extended phase space integrators.
//!
//! The midpoint-projected splitting methods are explicit Runge–Kutta methods
//! and the symmetric-projection methods are monoimplicit symplectic
//! Runge–Kutta methods. This crate builds those tableaux exactly, decides
//! their classical order, pseudosymplecticity and pseudosymmetry with
//! B-series in exact arithmetic, and runs the numerical experiments
//! (equivalence, defects, energy drift) in configurable precision.
//!
//! Module map:
//! - [`exactnum`]: rationals, Q(2^(1/3)), multiprecision floats.
//! - [`trees`]: rooted trees, densities, symmetries, elementary weights.
//! - [`tableau`]: tableau constructions and the symplecticity matrix.
//! - [`analysis`]: order, pseudosymplecticity and pseudosymmetry reports.
//! - [`integrate`]: steppers, test problems, defect and drift experiments.
//! - [`cli`]: the `projrk` command-line tool.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod integrate;
pub mod linalg;
pub mod tableau;
pub mod trees;

pub use error::{Error, Result};
pub use exactnum::{composition_alphas, CubicNum, MpFloat, Rational, Scalar, Scheme};
pub use tableau::{ButcherTableau, ExtendedTableau};
pub use trees::{RootedTree, TreeTable};
