use serde::Serialize;

use super::{ButcherTableau, CompositionCoefficients, Construction, TableauMeta};
use crate::error::{Error, Result};
use crate::exactnum::Scalar;
use crate::linalg::Matrix;

/// A = L + ¼ u vᵀ with L strictly lower triangular.
///
/// The stages then couple only through the single vector w = ¼ Σⱼ vⱼ kⱼ, so
/// a step costs one nonlinear solve in the phase-space dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonoimplicitForm {
    pub l: Matrix,
    pub u: Vec<Scalar>,
    pub v: Vec<Scalar>,
    pub b: Vec<Scalar>,
}

impl MonoimplicitForm {
    pub fn to_tableau(&self) -> Result<ButcherTableau> {
        let quarter = Scalar::ratio(1, 4);
        let a = self
            .l
            .iter()
            .zip(&self.u)
            .map(|(row, ui)| {
                row.iter()
                    .zip(&self.v)
                    .map(|(lij, vj)| lij + &(&quarter * &(ui * vj)))
                    .collect()
            })
            .collect();
        ButcherTableau::new(a, self.b.clone())
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }
}

fn sign(k: usize) -> Scalar {
    if k % 2 == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Closed-form tableau of the symmetric projection for alternating weights
/// a₁..a_s: uᵢ = (−1)ⁱ, vⱼ = aⱼ(−1)ʲ, Lᵢⱼ = aⱼ for j < i with i − j odd,
/// b = a/2.
pub fn monoimplicit_form(alist: &CompositionCoefficients) -> Result<MonoimplicitForm> {
    alist.check_alternating()?;
    let a = alist.as_slice();
    let s = a.len();
    let half = Scalar::ratio(1, 2);
    let l = (1..=s)
        .map(|i| {
            (1..=s)
                .map(|j| {
                    if j < i && (i - j) % 2 == 1 {
                        a[j - 1].clone()
                    } else {
                        Scalar::zero()
                    }
                })
                .collect()
        })
        .collect();
    Ok(MonoimplicitForm {
        l,
        u: (1..=s).map(sign).collect(),
        v: (1..=s).map(|j| &a[j - 1] * &sign(j)).collect(),
        b: a.iter().map(|x| &half * x).collect(),
    })
}

pub fn monoimplicit_tableau(alist: &CompositionCoefficients) -> Result<ButcherTableau> {
    Ok(monoimplicit_form(alist)?.to_tableau()?.with_meta(TableauMeta {
        construction: Construction::Monoimplicit,
        alphas: alist.0.clone(),
        scheme: None,
    }))
}

/// Splits A into strictly lower L plus a rank-one part ¼uvᵀ.
///
/// The rank-one part is pinned down only on and above the diagonal; entries
/// below are absorbed into L. u is scaled so its first nonzero entry is −1.
/// Explicit tableaux give u = v = 0.
pub fn monoimplicit_decompose(tab: &ButcherTableau) -> Result<MonoimplicitForm> {
    let a = tab.a();
    let m = tab.stages();
    let upper_nonzero = |j: usize| (0..=j).any(|i| !a[i][j].is_zero());
    let Some(last) = (0..m).rev().find(|&j| upper_nonzero(j)) else {
        return Ok(MonoimplicitForm {
            l: a.clone(),
            u: vec![Scalar::zero(); m],
            v: vec![Scalar::zero(); m],
            b: tab.b().to_vec(),
        });
    };

    let mut u: Vec<Scalar> = (0..m)
        .map(|i| if i <= last { a[i][last].clone() } else { Scalar::zero() })
        .collect();
    let mut w = vec![Scalar::zero(); m];
    w[last] = Scalar::one();
    for j in 0..last {
        match (0..=j).find(|&i| !u[i].is_zero()) {
            Some(i) => w[j] = a[i][j].checked_div(&u[i])?,
            None if upper_nonzero(j) => {
                return Err(Error::NotMonoimplicit(format!(
                    "column {} has entries on or above the diagonal where the rank-one factor vanishes",
                    j + 1
                )))
            }
            None => {}
        }
        if let Some(i) = (0..=j).find(|&i| a[i][j] != &u[i] * &w[j]) {
            return Err(Error::NotMonoimplicit(format!(
                "entry ({}, {}) breaks the rank-one pattern",
                i + 1,
                j + 1
            )));
        }
    }

    let first = u.iter().find(|x| !x.is_zero()).expect("column has a nonzero entry").clone();
    let scale = -first.inv()?;
    let four = Scalar::int(4);
    for x in u.iter_mut() {
        *x = &*x * &scale;
    }
    let v: Vec<Scalar> = w.iter().map(|x| (&four * x).checked_div(&scale)).collect::<Result<_>>()?;
    let quarter = Scalar::ratio(1, 4);
    let l = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if j >= i {
                        Scalar::zero()
                    } else {
                        &a[i][j] - &(&quarter * &(&u[i] * &v[j]))
                    }
                })
                .collect()
        })
        .collect();
    Ok(MonoimplicitForm {
        l,
        u,
        v,
        b: tab.b().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Scheme;
    use crate::tableau::symmetric_projection_tableau;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn two_stage_closed_form() {
        let t = monoimplicit_tableau(&CompositionCoefficients::new(vec![q(1, 1), q(1, 1)])).unwrap();
        assert_eq!(
            t.a(),
            &vec![vec![q(1, 4), q(-1, 4)], vec![q(3, 4), q(1, 4)]]
        );
        assert_eq!(t.b(), &[q(1, 2), q(1, 2)]);
    }

    #[test]
    fn leapfrog_matches_elimination() {
        let alist = CompositionCoefficients::alternating(Scheme::Leapfrog2);
        let t = monoimplicit_tableau(&alist).unwrap();
        assert_eq!(
            t.a(),
            &vec![
                vec![q(1, 8), q(-1, 4), q(1, 8)],
                vec![q(3, 8), q(1, 4), q(-1, 8)],
                vec![q(1, 8), q(3, 4), q(1, 8)],
            ]
        );
        assert_eq!(t.a(), symmetric_projection_tableau(&alist).unwrap().a());
    }

    #[test]
    fn decompose_recovers_factors() {
        let alist = CompositionCoefficients::alternating(Scheme::TripleJump4);
        let form = monoimplicit_form(&alist).unwrap();
        let back = monoimplicit_decompose(&form.to_tableau().unwrap()).unwrap();
        assert_eq!(back, form);
    }

    #[test]
    fn explicit_is_trivially_monoimplicit() {
        let f = monoimplicit_decompose(&ButcherTableau::explicit_euler()).unwrap();
        assert!(f.u.iter().chain(&f.v).all(Scalar::is_zero));
    }

    #[test]
    fn lobatto_iiic_rejected() {
        let t = ButcherTableau::new(
            vec![
                vec![q(1, 6), q(-1, 3), q(1, 6)],
                vec![q(1, 6), q(5, 12), q(-1, 12)],
                vec![q(1, 6), q(2, 3), q(1, 6)],
            ],
            vec![q(1, 6), q(2, 3), q(1, 6)],
        )
        .unwrap();
        assert!(matches!(
            monoimplicit_decompose(&t),
            Err(Error::NotMonoimplicit(_))
        ));
    }
}
