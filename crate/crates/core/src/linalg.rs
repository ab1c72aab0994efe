//! Dense exact linear algebra over [`Scalar`] for tableau manipulation.
//!
//! Pivoting tests exact zeros, so results are only meaningful for exact
//! entries.

use crate::error::{Error, Result};
use crate::exactnum::Scalar;

pub type Matrix = Vec<Vec<Scalar>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Scalar::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    m
}

pub fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let inner = a.first().map_or(0, Vec::len);
    if inner != b.len() {
        return Err(Error::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            a.len(),
            inner,
            b.len(),
            b.first().map_or(0, Vec::len)
        )));
    }
    let cols = b.first().map_or(0, Vec::len);
    Ok(a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, brow)| !x.is_zero() && !brow[j].is_zero())
                        .fold(Scalar::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect())
}

pub fn is_zero_matrix(a: &Matrix) -> bool {
    a.iter().all(|row| row.iter().all(Scalar::is_zero))
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(a: &Matrix) -> (Matrix, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for k in c..cols {
                    let t = &factor * &m[r][k];
                    m[i][k] = &m[i][k] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Matrix) -> usize {
    rref(a).1.len()
}

/// Basis of the right nullspace as the columns of the returned
/// `cols × (cols − rank)` matrix; one basis vector per free column, with a
/// 1 in that column.
pub fn nullspace(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    let (r, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = zeros(cols, free.len());
    for (k, &f) in free.iter().enumerate() {
        basis[f][k] = Scalar::one();
        for (row, &p) in pivots.iter().enumerate() {
            basis[p][k] = -&r[row][f];
        }
    }
    basis
}

/// Inverse of a square matrix, or [`Error::SingularSubmatrix`].
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("inverse needs a square matrix".into()));
    }
    let aug: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::SingularSubmatrix);
    }
    Ok(r.into_iter().map(|row| row[n..].to_vec()).collect())
}
