//! Vector fields and the built-in test problems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::real::Real;
use crate::error::{Error, Result};

/// ż = f(z), evaluable in any [`Real`] type.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval<R: Real>(&self, z: &[R]) -> Vec<R>;
}

/// Polynomial field fᵢ(z) = Σ c · ∏ z_k^{e_k}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialField {
    pub dim: usize,
    /// Per component: (coefficient, exponent vector).
    pub terms: Vec<Vec<(f64, Vec<u32>)>>,
}

impl PolynomialField {
    /// Random field with every monomial of degree ≤ `degree` and
    /// coefficients uniform in [−1, 1].
    pub fn random(dim: usize, degree: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let monomials = monomials(dim, degree);
        let terms = (0..dim)
            .map(|_| {
                monomials
                    .iter()
                    .map(|e| (rng.gen_range(-1.0..=1.0), e.clone()))
                    .collect()
            })
            .collect();
        PolynomialField { dim, terms }
    }

    fn eval<R: Real>(&self, z: &[R]) -> Vec<R> {
        let zero = z[0].zero_like();
        self.terms
            .iter()
            .map(|comp| {
                comp.iter().fold(zero.clone(), |acc, (c, exps)| {
                    let mut term = z[0].cst(*c);
                    for (x, &e) in z.iter().zip(exps) {
                        for _ in 0..e {
                            term = term * x.clone();
                        }
                    }
                    acc + term
                })
            })
            .collect()
    }
}

fn monomials(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(k: usize, dim: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == dim {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(k + 1, dim, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, dim, degree, &mut Vec::new(), &mut out);
    out
}

/// y ↦ T f(T⁻¹(y − s)): the field f seen through the affine map y = Tz + s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineConjugate {
    pub inner: Box<Problem>,
    pub t: Vec<Vec<f64>>,
    pub t_inv: Vec<Vec<f64>>,
    pub shift: Vec<f64>,
}

impl AffineConjugate {
    pub fn new(inner: Problem, t: Vec<Vec<f64>>, shift: Vec<f64>) -> Result<Self> {
        let n = inner.dim();
        if t.len() != n || t.iter().any(|r| r.len() != n) || shift.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: t.len(),
            });
        }
        let t_inv = invert_f64(&t).ok_or_else(|| Error::Invalid("affine map is singular".into()))?;
        Ok(AffineConjugate {
            inner: Box::new(inner),
            t,
            t_inv,
            shift,
        })
    }

    pub fn forward(&self, z: &[f64]) -> Vec<f64> {
        matvec_f64(&self.t, z).iter().zip(&self.shift).map(|(a, b)| a + b).collect()
    }

    pub fn backward(&self, y: &[f64]) -> Vec<f64> {
        let centered: Vec<f64> = y.iter().zip(&self.shift).map(|(a, b)| a - b).collect();
        matvec_f64(&self.t_inv, &centered)
    }

    fn eval<R: Real>(&self, y: &[R]) -> Vec<R> {
        let centered: Vec<R> = y
            .iter()
            .zip(&self.shift)
            .map(|(v, &s)| v.clone() - v.cst(s))
            .collect();
        let z = matvec(&self.t_inv, &centered);
        matvec(&self.t, &self.inner.eval(&z))
    }
}

fn matvec<R: Real>(m: &[Vec<f64>], x: &[R]) -> Vec<R> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(x[0].zero_like(), |acc, (&a, xi)| acc + xi.cst(a) * xi.clone())
        })
        .collect()
}

fn matvec_f64(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn invert_f64(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c] == 0.0 {
            return None;
        }
        m.swap(c, p);
        let piv = m[c][c];
        for x in m[c].iter_mut() {
            *x /= piv;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                for k in 0..2 * n {
                    m[i][k] -= f * m[c][k];
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Field {
    /// H = (q² + p²)/2.
    Harmonic,
    /// H = (q² + 1)(p² + 1)/2.
    Nonseparable,
    /// ż = ω × z.
    Rotation { omega: [f64; 3] },
    /// H = |p|²/2 − 1/|q| in the plane, state (q₁, q₂, p₁, p₂).
    Kepler,
    /// ż = M z.
    Linear { m: Vec<Vec<f64>> },
    Polynomial(PolynomialField),
    Affine(AffineConjugate),
}

/// A vector field with whatever geometric structure it carries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    pub name: String,
    pub field: Field,
    /// Symmetric C with zᵀCz a first integral.
    pub quadratic_invariant: Option<Vec<Vec<f64>>>,
    /// Constant symplectic structure (skew, invertible).
    pub symplectic_structure: Option<Vec<Vec<f64>>>,
    /// Suggested initial state.
    pub z0: Vec<f64>,
}

fn canonical_j(d: usize) -> Vec<Vec<f64>> {
    let n = 2 * d;
    let mut j = vec![vec![0.0; n]; n];
    for i in 0..d {
        j[i][d + i] = 1.0;
        j[d + i][i] = -1.0;
    }
    j
}

fn identity_f64(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

impl Problem {
    pub fn harmonic() -> Self {
        Problem {
            name: "harmonic".into(),
            field: Field::Harmonic,
            quadratic_invariant: Some(identity_f64(2)),
            symplectic_structure: Some(canonical_j(1)),
            z0: vec![1.0, 0.0],
        }
    }

    pub fn nonseparable() -> Self {
        Problem {
            name: "nonseparable".into(),
            field: Field::Nonseparable,
            quadratic_invariant: None,
            symplectic_structure: Some(canonical_j(1)),
            z0: vec![0.5, 0.0],
        }
    }

    pub fn rotation() -> Self {
        Problem {
            name: "rotation".into(),
            field: Field::Rotation {
                omega: [0.3, -0.5, 0.8],
            },
            quadratic_invariant: Some(identity_f64(3)),
            symplectic_structure: None,
            z0: vec![1.0, 0.5, -0.25],
        }
    }

    pub fn kepler() -> Self {
        let mut c = vec![vec![0.0; 4]; 4];
        c[0][3] = 0.5;
        c[3][0] = 0.5;
        c[1][2] = -0.5;
        c[2][1] = -0.5;
        // eccentricity 0.5 started at pericentre
        Problem {
            name: "kepler".into(),
            field: Field::Kepler,
            quadratic_invariant: Some(c),
            symplectic_structure: Some(canonical_j(2)),
            z0: vec![0.5, 0.0, 0.0, 3f64.sqrt()],
        }
    }

    pub fn linear(m: Vec<Vec<f64>>) -> Self {
        let n = m.len();
        Problem {
            name: "linear".into(),
            field: Field::Linear { m },
            quadratic_invariant: None,
            symplectic_structure: None,
            z0: vec![1.0; n],
        }
    }

    pub fn polynomial(field: PolynomialField) -> Self {
        let n = field.dim;
        Problem {
            name: "polynomial".into(),
            field: Field::Polynomial(field),
            quadratic_invariant: None,
            symplectic_structure: None,
            z0: vec![0.1; n],
        }
    }

    /// Random polynomial field of the given dimension and degree.
    pub fn random_polynomial(dim: usize, degree: u32, seed: u64) -> Self {
        let mut p = Problem::polynomial(PolynomialField::random(dim, degree, seed));
        p.name = format!("polynomial-{dim}d-deg{degree}-seed{seed}");
        p
    }

    /// The problem transported by y = Tz + s. Quadratic invariants and
    /// symplectic structures are transported as well.
    pub fn affine_conjugate(&self, t: Vec<Vec<f64>>, shift: Vec<f64>) -> Result<Self> {
        let conj = AffineConjugate::new(self.clone(), t, shift)?;
        let z0 = conj.forward(&self.z0);
        // zᵀCz = (y − s)ᵀ T⁻ᵀ C T⁻¹ (y − s): only homogeneous when s = 0
        let transport = |m: &Vec<Vec<f64>>| {
            let ti = &conj.t_inv;
            let n = ti.len();
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            (0..n)
                                .flat_map(|a| (0..n).map(move |b| (a, b)))
                                .map(|(a, b)| ti[a][i] * m[a][b] * ti[b][j])
                                .sum()
                        })
                        .collect()
                })
                .collect::<Vec<Vec<f64>>>()
        };
        let homogeneous = conj.shift.iter().all(|&x| x == 0.0);
        Ok(Problem {
            name: format!("affine({})", self.name),
            quadratic_invariant: self
                .quadratic_invariant
                .as_ref()
                .filter(|_| homogeneous)
                .map(transport),
            symplectic_structure: self.symplectic_structure.as_ref().map(transport),
            field: Field::Affine(conj),
            z0,
        })
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "harmonic" => Ok(Problem::harmonic()),
            "nonseparable" => Ok(Problem::nonseparable()),
            "rotation" => Ok(Problem::rotation()),
            "kepler" => Ok(Problem::kepler()),
            _ => Err(Error::Invalid(format!(
                "unknown problem {name:?}; expected one of {}",
                BUILTIN_NAMES.join(", ")
            ))),
        }
    }

    pub fn has_hamiltonian(&self) -> bool {
        matches!(self.field, Field::Harmonic | Field::Nonseparable | Field::Kepler)
    }

    pub fn hamiltonian<R: Real>(&self, z: &[R]) -> Option<R> {
        let half = z[0].cst(0.5);
        let one = z[0].cst(1.0);
        match &self.field {
            Field::Harmonic => Some(half * (z[0].clone() * z[0].clone() + z[1].clone() * z[1].clone())),
            Field::Nonseparable => {
                let (q, p) = (z[0].clone(), z[1].clone());
                Some(half * (q.clone() * q + one.clone()) * (p.clone() * p + one))
            }
            Field::Kepler => {
                let r2 = z[0].clone() * z[0].clone() + z[1].clone() * z[1].clone();
                let kinetic = half * (z[2].clone() * z[2].clone() + z[3].clone() * z[3].clone());
                Some(kinetic - one / r2.sqrt())
            }
            _ => None,
        }
    }

    pub fn quadratic_value<R: Real>(&self, z: &[R]) -> Option<R> {
        let c = self.quadratic_invariant.as_ref()?;
        let cz = matvec(c, z);
        Some(
            z.iter()
                .zip(cz)
                .fold(z[0].zero_like(), |acc, (a, b)| acc + a.clone() * b),
        )
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["harmonic", "nonseparable", "rotation", "kepler"];

pub fn builtin_problems() -> Vec<Problem> {
    BUILTIN_NAMES
        .iter()
        .map(|n| Problem::by_name(n).expect("builtin"))
        .collect()
}

impl VectorField for Problem {
    fn dim(&self) -> usize {
        match &self.field {
            Field::Harmonic | Field::Nonseparable => 2,
            Field::Rotation { .. } => 3,
            Field::Kepler => 4,
            Field::Linear { m } => m.len(),
            Field::Polynomial(p) => p.dim,
            Field::Affine(a) => a.inner.dim(),
        }
    }

    fn eval<R: Real>(&self, z: &[R]) -> Vec<R> {
        match &self.field {
            Field::Harmonic => vec![z[1].clone(), -z[0].clone()],
            Field::Nonseparable => {
                let one = z[0].cst(1.0);
                let (q, p) = (z[0].clone(), z[1].clone());
                vec![
                    (q.clone() * q.clone() + one.clone()) * p.clone(),
                    -(q * (p.clone() * p + one)),
                ]
            }
            Field::Rotation { omega } => {
                let w: Vec<R> = omega.iter().map(|&x| z[0].cst(x)).collect();
                vec![
                    w[1].clone() * z[2].clone() - w[2].clone() * z[1].clone(),
                    w[2].clone() * z[0].clone() - w[0].clone() * z[2].clone(),
                    w[0].clone() * z[1].clone() - w[1].clone() * z[0].clone(),
                ]
            }
            Field::Kepler => {
                let r2 = z[0].clone() * z[0].clone() + z[1].clone() * z[1].clone();
                let r3 = r2.clone() * r2.sqrt();
                vec![
                    z[2].clone(),
                    z[3].clone(),
                    -(z[0].clone() / r3.clone()),
                    -(z[1].clone() / r3),
                ]
            }
            Field::Linear { m } => matvec(m, z),
            Field::Polynomial(p) => p.eval(z),
            Field::Affine(a) => a.eval(z),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_and_nonseparable_values() {
        assert_eq!(Problem::harmonic().eval(&[1.0, 0.0]), vec![0.0, -1.0]);
        let ns = Problem::nonseparable();
        assert_eq!(ns.eval(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(ns.hamiltonian(&[0.0, 0.0]), Some(0.5));
    }

    #[test]
    fn fields_follow_hamiltonian_gradients() {
        // f = J∇H by central differences
        for p in [Problem::harmonic(), Problem::nonseparable(), Problem::kepler()] {
            let n = p.dim();
            let z: Vec<f64> = (0..n).map(|i| 0.4 + 0.1 * i as f64).collect();
            let f = p.eval(&z);
            let j = p.symplectic_structure.clone().unwrap();
            let grad: Vec<f64> = (0..n)
                .map(|k| {
                    let e = 1e-6;
                    let mut zp = z.clone();
                    let mut zm = z.clone();
                    zp[k] += e;
                    zm[k] -= e;
                    (p.hamiltonian(&zp).unwrap() - p.hamiltonian(&zm).unwrap()) / (2.0 * e)
                })
                .collect();
            for i in 0..n {
                let jg: f64 = (0..n).map(|k| j[i][k] * grad[k]).sum();
                assert!((jg - f[i]).abs() < 1e-8, "{}", p.name);
            }
        }
    }

    #[test]
    fn quadratic_invariants_are_conserved_by_fields() {
        // d/dt zᵀCz = 2 zᵀC f(z) = 0
        for p in [Problem::harmonic(), Problem::rotation(), Problem::kepler()] {
            let z: Vec<f64> = (0..p.dim()).map(|i| 0.3 - 0.2 * i as f64).collect();
            let c = p.quadratic_invariant.clone().unwrap();
            let cz = matvec_f64(&c, &z);
            let rate: f64 = cz.iter().zip(p.eval(&z)).map(|(a, b)| a * b).sum();
            assert!(rate.abs() < 1e-14, "{}", p.name);
        }
    }

    #[test]
    fn affine_roundtrip() {
        let p = Problem::random_polynomial(3, 2, 7);
        let t = vec![vec![1.0, 0.2, 0.0], vec![0.1, 0.9, 0.3], vec![0.0, -0.4, 1.2]];
        let c = p.affine_conjugate(t, vec![0.1, -0.2, 0.3]).unwrap();
        let Field::Affine(a) = &c.field else { unreachable!() };
        let z = [0.3, -0.1, 0.5];
        let back = a.backward(&a.forward(&z));
        for (x, y) in back.iter().zip(z) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(monomials(3, 2).len(), 10);
    }
}
