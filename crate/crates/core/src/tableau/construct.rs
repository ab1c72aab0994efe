//! Symbolic propagation of the duplicated system ż = f(ẑ), dẑ/dt = f(z).
//!
//! Both copies are tracked as affine combinations z₀ + h·Σ wⱼ kⱼ of the
//! slopes. A substep on the base copy evaluates f at the current duplicate
//! and adds its weight to the base copy; a substep on the duplicate does the
//! reverse. Every substep therefore introduces exactly one stage.

use super::{ButcherTableau, CompositionCoefficients, Construction, ExtendedTableau, TableauMeta};
use crate::error::Result;
use crate::exactnum::Scalar;
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Base,
    Duplicate,
}

/// Merged substep weights of ∏ (½α A)(α B)(½α A): adjacent half steps on
/// the base copy are fused, giving 2s+1 alternating weights that start and
/// end on the base copy.
pub fn alternating_substeps(alphas: &[Scalar]) -> Vec<Scalar> {
    let half = Scalar::ratio(1, 2);
    let mut chain: Vec<(Side, Scalar)> = Vec::with_capacity(2 * alphas.len() + 1);
    for alpha in alphas {
        let h = &half * alpha;
        for step in [
            (Side::Base, h.clone()),
            (Side::Duplicate, alpha.clone()),
            (Side::Base, h),
        ] {
            match chain.last_mut() {
                Some(last) if last.0 == step.0 => last.1 = &last.1 + &step.1,
                _ => chain.push(step),
            }
        }
    }
    chain.into_iter().map(|(_, w)| w).collect()
}

struct Propagation {
    /// Stage rows, one per substep, over all slope columns.
    stages: Matrix,
    base: Vec<Scalar>,
    duplicate: Vec<Scalar>,
}

/// Runs the alternating substeps (first on the base copy). With `shift`
/// an extra slope column k_{s+1} = μ/h is appended and the copies start at
/// z₀ + μ and z₀ − μ.
fn propagate(weights: &[Scalar], shift: bool) -> Propagation {
    let s = weights.len();
    let cols = s + usize::from(shift);
    let mut base = vec![Scalar::zero(); cols];
    let mut duplicate = vec![Scalar::zero(); cols];
    if shift {
        base[s] = Scalar::one();
        duplicate[s] = -Scalar::one();
    }
    let mut stages = Vec::with_capacity(s);
    for (i, w) in weights.iter().enumerate() {
        if i % 2 == 0 {
            stages.push(duplicate.clone());
            base[i] = &base[i] + w;
        } else {
            stages.push(base.clone());
            duplicate[i] = &duplicate[i] + w;
        }
    }
    Propagation {
        stages,
        base,
        duplicate,
    }
}

fn average(x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let half = Scalar::ratio(1, 2);
    x.iter().zip(y).map(|(a, b)| &half * &(a + b)).collect()
}

/// Explicit (2s+1)-stage tableau of the midpoint-projected composition
/// ∏ Φ_{αᵢh}: b is the average of the two copies' final weights.
pub fn midpoint_projection_tableau(alphas: &CompositionCoefficients) -> Result<ButcherTableau> {
    alphas.check_unit_sum()?;
    let weights = alternating_substeps(alphas.as_slice());
    let p = propagate(&weights, false);
    let b = average(&p.base, &p.duplicate);
    Ok(ButcherTableau::new(p.stages, b)?.with_meta(TableauMeta {
        construction: Construction::Midpoint,
        alphas: alphas.0.clone(),
        scheme: None,
    }))
}

/// Extended Runge–Kutta form of the symmetric projection S_μ ∘ Ψ_h ∘ S_μ
/// for alternating weights a₁..a_s (a₁ on the base copy).
///
/// The slope k_{s+1} = μ/h is the extra unknown. The single constraint row
/// is (duplicate end − μ) − (base end + μ), and b averages the two unshifted
/// ends, so b_{s+1} = 0.
pub fn symmetric_projection_extended(alist: &CompositionCoefficients) -> Result<ExtendedTableau> {
    alist.check_alternating()?;
    let s = alist.len();
    let p = propagate(alist.as_slice(), true);
    let mut base = p.base;
    let mut duplicate = p.duplicate;
    base[s] = &base[s] + &Scalar::one();
    duplicate[s] = &duplicate[s] - &Scalar::one();
    let d: Vec<Scalar> = duplicate.iter().zip(&base).map(|(y, x)| y - x).collect();
    let b = average(&base, &duplicate);
    ExtendedTableau::new(p.stages, b, vec![d])
}

/// Symmetric projection as a square tableau, after eliminating μ.
pub fn symmetric_projection_tableau(alist: &CompositionCoefficients) -> Result<ButcherTableau> {
    let ext = symmetric_projection_extended(alist)?;
    Ok(super::eliminate_constraints(&ext)?.with_meta(TableauMeta {
        construction: Construction::Symmetric,
        alphas: alist.0.clone(),
        scheme: None,
    }))
}
