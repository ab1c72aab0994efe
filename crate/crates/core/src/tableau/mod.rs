//! Butcher tableaux and the constructions that turn projected extended
//! phase space integrators into Runge–Kutta methods.

mod construct;
mod extended;
mod monoimplicit;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use construct::{
    alternating_substeps, midpoint_projection_tableau, symmetric_projection_extended,
    symmetric_projection_tableau,
};
pub use extended::{
    eliminate_constraints, m_matrix, quadratic_preservation_check, ExtendedTableau, QuadraticCheck,
};
pub use monoimplicit::{monoimplicit_decompose, monoimplicit_form, monoimplicit_tableau, MonoimplicitForm};

use crate::error::{Error, Result};
use crate::exactnum::{composition_alphas, Scalar, Scheme};
use crate::linalg::Matrix;

/// Which construction produced a tableau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Midpoint,
    Symmetric,
    Monoimplicit,
    Composed,
    Custom,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Construction::Midpoint => "midpoint",
            Construction::Symmetric => "symmetric",
            Construction::Monoimplicit => "monoimplicit",
            Construction::Composed => "composed",
            Construction::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableauMeta {
    pub construction: Construction,
    #[serde(default)]
    pub alphas: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
}

/// Substep weights of a composition method.
///
/// For the midpoint projection these are the leapfrog step fractions
/// α₁..α_s (summing to one). For the symmetric projection they are the
/// alternating flow weights a₁..a_s, odd entries acting on the base copy and
/// even entries on the duplicate; each family sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionCoefficients(pub Vec<Scalar>);

impl CompositionCoefficients {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        CompositionCoefficients(coeffs)
    }

    /// Leapfrog fractions of a scheme, for the midpoint projection.
    pub fn leapfrog_fractions(scheme: Scheme) -> Self {
        CompositionCoefficients(composition_alphas(scheme))
    }

    /// Alternating flow weights of a scheme, for the symmetric projection.
    pub fn alternating(scheme: Scheme) -> Self {
        CompositionCoefficients(alternating_substeps(&composition_alphas(scheme)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Scalar] {
        &self.0
    }

    pub fn check_unit_sum(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::Consistency("no substeps".into()));
        }
        let total = sum(&self.0);
        if total != Scalar::one() {
            return Err(Error::Consistency(format!("substeps sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn check_alternating(&self) -> Result<()> {
        let odd: Vec<Scalar> = self.0.iter().step_by(2).cloned().collect();
        let even: Vec<Scalar> = self.0.iter().skip(1).step_by(2).cloned().collect();
        let (so, se) = (sum(&odd), sum(&even));
        if so != Scalar::one() || se != Scalar::one() {
            return Err(Error::Consistency(format!(
                "odd-indexed weights sum to {so} and even-indexed to {se}; both must be 1"
            )));
        }
        Ok(())
    }
}

impl From<Vec<Scalar>> for CompositionCoefficients {
    fn from(v: Vec<Scalar>) -> Self {
        CompositionCoefficients(v)
    }
}

pub(crate) fn sum(xs: &[Scalar]) -> Scalar {
    xs.iter().fold(Scalar::zero(), |acc, x| acc + x)
}

/// Runge–Kutta coefficients (A, b, c) with c = A·𝟙.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    a: Matrix,
    b: Vec<Scalar>,
    c: Vec<Scalar>,
    meta: Option<TableauMeta>,
}

impl ButcherTableau {
    pub fn new(a: Matrix, b: Vec<Scalar>) -> Result<Self> {
        let m = b.len();
        if m == 0 {
            return Err(Error::Shape("a tableau needs at least one stage".into()));
        }
        if a.len() != m || a.iter().any(|row| row.len() != m) {
            return Err(Error::Shape(format!(
                "A must be {m}x{m} to match b of length {m}"
            )));
        }
        let c = a.iter().map(|row| sum(row)).collect();
        Ok(ButcherTableau { a, b, c, meta: None })
    }

    /// Zero-stage tableau: the identity map.
    pub fn identity() -> Self {
        ButcherTableau {
            a: Vec::new(),
            b: Vec::new(),
            c: Vec::new(),
            meta: None,
        }
    }

    /// Unchecked constructor for shapes known to be consistent, including
    /// the zero-stage identity.
    pub(crate) fn from_parts(a: Matrix, b: Vec<Scalar>, meta: Option<TableauMeta>) -> Self {
        let c = a.iter().map(|row| sum(row)).collect();
        ButcherTableau { a, b, c, meta }
    }

    pub fn explicit_euler() -> Self {
        ButcherTableau::new(vec![vec![Scalar::zero()]], vec![Scalar::one()]).expect("valid")
    }

    pub fn from_rows(a: &[&[Scalar]], b: &[Scalar]) -> Result<Self> {
        ButcherTableau::new(a.iter().map(|r| r.to_vec()).collect(), b.to_vec())
    }

    pub fn with_meta(mut self, meta: TableauMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[Scalar] {
        &self.b
    }

    pub fn c(&self) -> &[Scalar] {
        &self.c
    }

    pub fn meta(&self) -> Option<&TableauMeta> {
        self.meta.as_ref()
    }

    /// A strictly lower triangular.
    pub fn is_explicit(&self) -> bool {
        self.a
            .iter()
            .enumerate()
            .all(|(i, row)| row[i..].iter().all(Scalar::is_zero))
    }

    pub fn is_exact(&self) -> bool {
        self.b.iter().chain(self.a.iter().flatten()).all(Scalar::is_exact)
    }

    /// Copy with every entry rounded to a float of `bits` precision.
    pub fn to_float_kind(&self, bits: u32) -> Result<Self> {
        let conv = |xs: &[Scalar]| xs.iter().map(|x| x.into_float_kind(bits)).collect::<Result<Vec<_>>>();
        let a = self.a.iter().map(|r| conv(r)).collect::<Result<Matrix>>()?;
        let mut t = ButcherTableau::new(a, conv(&self.b)?)?;
        t.meta = self.meta.clone();
        Ok(t)
    }

    /// Symmetric under stage reversal: aᵢⱼ + a_{m+1−i, m+1−j} = bⱼ and
    /// bⱼ = b_{m+1−j}. Such a method equals its adjoint.
    pub fn is_reversal_symmetric(&self) -> bool {
        let m = self.stages();
        (0..m).all(|j| self.b[j] == self.b[m - 1 - j])
            && (0..m).all(|i| {
                (0..m).all(|j| &self.a[i][j] + &self.a[m - 1 - i][m - 1 - j] == self.b[j])
            })
    }

    /// Largest |entry| in A and b, as a double.
    pub fn max_abs_f64(&self) -> f64 {
        self.b
            .iter()
            .chain(self.a.iter().flatten())
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Aligned human-readable table with decimal entries.
    pub fn pretty(&self) -> String {
        let fmt = |x: &Scalar| format!("{:.12}", x.to_f64());
        let mut out = String::new();
        let width = 16;
        for (i, row) in self.a.iter().enumerate() {
            out.push_str(&format!("{:>width$} |", fmt(&self.c[i])));
            for x in row {
                out.push_str(&format!(" {:>width$}", fmt(x)));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:->w$}\n", "", w = (width + 1) * (self.stages() + 1) + 2));
        out.push_str(&format!("{:>width$} |", ""));
        for x in &self.b {
            out.push_str(&format!(" {:>width$}", fmt(x)));
        }
        out.push('\n');
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TableauRepr {
    m: usize,
    #[serde(rename = "A")]
    a: Matrix,
    b: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<TableauMeta>,
}

impl Serialize for ButcherTableau {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableauRepr {
            m: self.stages(),
            a: self.a.clone(),
            b: self.b.clone(),
            c: Some(self.c.clone()),
            meta: self.meta.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ButcherTableau {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = TableauRepr::deserialize(d)?;
        if repr.m != repr.b.len() {
            return Err(D::Error::custom(format!(
                "m = {} but b has {} entries",
                repr.m,
                repr.b.len()
            )));
        }
        let mut tab = ButcherTableau::new(repr.a, repr.b).map_err(D::Error::custom)?;
        if let Some(c) = repr.c {
            if c != tab.c {
                return Err(D::Error::custom("c does not equal the row sums of A"));
            }
        }
        tab.meta = repr.meta;
        Ok(tab)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn row_sums_enforced() {
        let t = ButcherTableau::new(
            vec![vec![q(0, 1), q(0, 1)], vec![q(2, 3), q(0, 1)]],
            vec![q(1, 4), q(3, 4)],
        )
        .unwrap();
        assert_eq!(t.c(), &[q(0, 1), q(2, 3)]);
        assert!(t.is_explicit());
        let bad = serde_json::json!({"m": 1, "A": [["1/2"]], "b": ["1"], "c": ["1"]});
        assert!(serde_json::from_value::<ButcherTableau>(bad).is_err());
    }

    #[test]
    fn shape_errors() {
        assert!(ButcherTableau::new(vec![], vec![]).is_err());
        assert!(ButcherTableau::new(vec![vec![q(1, 1)]], vec![q(1, 1), q(0, 1)]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let t = midpoint_projection_tableau(&CompositionCoefficients::leapfrog_fractions(
            Scheme::TripleJump4,
        ))
        .unwrap();
        let text = serde_json::to_string(&t).unwrap();
        let back: ButcherTableau = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn coefficient_checks() {
        let lf = CompositionCoefficients::new(vec![q(1, 2), q(1, 1), q(1, 2)]);
        assert!(lf.check_alternating().is_ok());
        assert!(lf.check_unit_sum().is_err());
        assert!(CompositionCoefficients::new(vec![q(1, 1)]).check_alternating().is_err());
        assert_eq!(CompositionCoefficients::alternating(Scheme::Leapfrog2), lf);
    }
}
