use serde::Serialize;

use super::ButcherTableau;
use crate::error::{Error, Result};
use crate::exactnum::Scalar;
use crate::linalg::{self, Matrix};

/// Runge–Kutta scheme with m slopes, of which the first s are evaluated:
///
/// ```text
/// Zᵢ = z₀ + h Σⱼ aᵢⱼ kⱼ   (i ≤ s),   kᵢ = f(Zᵢ)
/// z₁ = z₀ + h Σⱼ bⱼ kⱼ
/// 0  = Σⱼ dᵢⱼ kⱼ          (m − s full-rank constraints)
/// ```
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedTableau {
    s: usize,
    m: usize,
    a: Matrix,
    b: Vec<Scalar>,
    d: Matrix,
}

impl ExtendedTableau {
    pub fn new(a: Matrix, b: Vec<Scalar>, d: Matrix) -> Result<Self> {
        let m = b.len();
        let s = a.len();
        if s == 0 || s > m {
            return Err(Error::Shape(format!("need 1 ≤ s ≤ m, got s = {s}, m = {m}")));
        }
        if a.iter().chain(&d).any(|row| row.len() != m) {
            return Err(Error::Shape(format!("rows of a and d must have {m} entries")));
        }
        if d.len() != m - s {
            return Err(Error::Shape(format!(
                "d must have m − s = {} rows, got {}",
                m - s,
                d.len()
            )));
        }
        let rank = linalg::rank(&d);
        if rank != m - s {
            return Err(Error::RankDeficient {
                rank,
                expected: m - s,
            });
        }
        Ok(ExtendedTableau { s, m, a, b, d })
    }

    /// Evaluated stages.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Total slopes.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[Scalar] {
        &self.b
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }
}

/// Solves the constraints for the extra slopes k_{s+1..m} in terms of
/// k₁..k_s and substitutes them into the stage and update equations.
pub fn eliminate_constraints(ext: &ExtendedTableau) -> Result<ButcherTableau> {
    let (s, m) = (ext.s, ext.m);
    let split = |rows: &Matrix, lo: usize, hi: usize| -> Matrix {
        rows.iter().map(|r| r[lo..hi].to_vec()).collect()
    };
    let d_extra = split(&ext.d, s, m);
    let d_stage = split(&ext.d, 0, s);
    // k_extra = G k_stage with G = −d_extra⁻¹ d_stage
    let g: Matrix = if m == s {
        Vec::new()
    } else {
        let inv = linalg::inverse(&d_extra)?;
        linalg::matmul(&inv, &d_stage)?
            .into_iter()
            .map(|row| row.into_iter().map(|x| -x).collect())
            .collect()
    };
    let substitute = |row: &[Scalar]| -> Vec<Scalar> {
        (0..s)
            .map(|j| {
                (s..m).fold(row[j].clone(), |acc, e| {
                    if row[e].is_zero() {
                        acc
                    } else {
                        acc + &row[e] * &g[e - s][j]
                    }
                })
            })
            .collect()
    };
    let a = ext.a.iter().map(|row| substitute(row)).collect();
    let b = substitute(&ext.b);
    ButcherTableau::new(a, b)
}

/// Mᵢⱼ = bᵢbⱼ − bᵢaᵢⱼ − bⱼaⱼᵢ over all m slopes; rows of `a` beyond its
/// length count as zero.
pub fn m_matrix(a: &Matrix, b: &[Scalar]) -> Matrix {
    let m = b.len();
    let entry = |i: usize, j: usize| -> Scalar {
        a.get(i).map_or(Scalar::zero(), |row| row[j].clone())
    };
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| &b[i] * &b[j] - &b[i] * &entry(i, j) - &b[j] * &entry(j, i))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticCheck {
    pub preserving: bool,
    /// bᵢ = 0 for every extra slope.
    pub extra_weights_vanish: bool,
    pub m: Matrix,
    /// Columns span the nullspace of d.
    pub v: Matrix,
    pub vt_m_v: Matrix,
}

/// Sufficient condition for preserving quadratic invariants (and
/// symplecticity): b vanishes on the extra slopes and VᵀMV = 0, V a basis of
/// ker d.
pub fn quadratic_preservation_check(ext: &ExtendedTableau) -> QuadraticCheck {
    let m = m_matrix(&ext.a, &ext.b);
    let v = if ext.d.is_empty() {
        linalg::identity(ext.m)
    } else {
        linalg::nullspace(&ext.d)
    };
    let vt_m_v = linalg::matmul(&linalg::matmul(&linalg::transpose(&v), &m).expect("square"), &v)
        .expect("conformable");
    let extra_weights_vanish = ext.b[ext.s..].iter().all(Scalar::is_zero);
    QuadraticCheck {
        preserving: extra_weights_vanish && linalg::is_zero_matrix(&vt_m_v),
        extra_weights_vanish,
        m,
        v,
        vt_m_v,
    }
}
