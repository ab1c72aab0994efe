//! Classical order, pseudosymplecticity and pseudosymmetry of a tableau via
//! B-series.
//!
//! All orders follow one convention: order k means every condition of
//! total order ≤ k holds, so the first failure at total order n gives k = n − 1.
//! For pseudosymplecticity a pair (u, v) has total order |u| + |v| and the
//! residual Φ(u)Φ(v) − Φ(u∘v) − Φ(v∘u) enters the pulled-back symplectic form
//! at h^{|u|+|v|}. The census also lists the single order-1 condition (the
//! linear term of the pullback), which every consistent B-series satisfies.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::Scalar;
use crate::tableau::{m_matrix, ButcherTableau, Construction, TableauMeta};
use crate::trees::{enumerate_trees, ElementaryWeights, RootedTree, TreeTable, MAX_TREE_ORDER};

/// Largest pseudosymplecticity / pseudosymmetry order that can be certified.
pub const MAX_ANALYSIS_ORDER: usize = MAX_TREE_ORDER - 1;

/// Residuals of float tableaux below this magnitude count as zero.
pub const FLOAT_TOLERANCE: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Exactly this order: the next conditions fail.
    Finite(u32),
    /// Every condition up to the search cap holds.
    AtLeast(u32),
    /// Holds to all orders (structural certificate).
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(k) => Some(k),
            _ => None,
        }
    }

    /// Guaranteed lower bound.
    pub fn lower_bound(self) -> Option<u32> {
        match self {
            Order::Finite(k) | Order::AtLeast(k) => Some(k),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::AtLeast(k) => write!(f, "≥{k}"),
            Order::Infinite => f.write_str("∞"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Order::Finite(k) => s.serialize_u32(*k),
            Order::AtLeast(k) => {
                let mut map = s.serialize_map(Some(1))?;
                map.serialize_entry("at_least", k)?;
                map.end()
            }
            Order::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeResidual {
    pub tree: RootedTree,
    pub residual: Scalar,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairResidual {
    pub u: RootedTree,
    pub v: RootedTree,
    pub residual: Scalar,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderCheck {
    pub order: Order,
    pub violations: Vec<TreeResidual>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub order: usize,
    pub conditions: usize,
    pub satisfied: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PseudosymplecticCheck {
    pub order: Order,
    /// M = 0 exactly.
    pub symplectic: bool,
    pub census: Vec<CensusRow>,
    pub violations: Vec<PairResidual>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderReport {
    pub max_order: usize,
    pub stages: usize,
    pub explicit: bool,
    pub exact: bool,
    pub symplectic: bool,
    pub classical_order: Order,
    pub pseudosymplectic_order: Order,
    pub pseudosymmetry_order: Order,
    pub census: Vec<CensusRow>,
    pub violated_conditions: ViolatedConditions,
}

#[derive(Debug, Clone, Serialize)]
pub struct ViolatedConditions {
    pub classical: Vec<TreeResidual>,
    pub pseudosymplectic: Vec<PairResidual>,
    pub pseudosymmetry: Vec<TreeResidual>,
}

fn vanishes(x: &Scalar) -> bool {
    x.is_zero_within(FLOAT_TOLERANCE)
}

fn check_cap(requested: usize, limit: usize) -> Result<()> {
    if requested > limit {
        return Err(Error::OrderLimit { requested, limit });
    }
    Ok(())
}

fn table_for(order: usize) -> Result<TreeTable> {
    enumerate_trees(order.max(1))
}

/// Classical order up to `p_max`, with the nonzero residuals Φ(t) − 1/γ(t)
/// at the first failing order.
pub fn classical_order(tab: &ButcherTableau, p_max: usize) -> Result<OrderCheck> {
    check_cap(p_max, MAX_TREE_ORDER)?;
    let table = table_for(p_max)?;
    Ok(classical_order_with(&table, tab, p_max))
}

fn order_residuals(table: &TreeTable, phi: &ElementaryWeights, order: usize) -> Vec<TreeResidual> {
    table
        .ids_of_order(order)
        .map(|id| {
            let e = table.entry(id);
            TreeResidual {
                tree: e.tree.clone(),
                residual: phi.phi(id) - &Scalar::ratio(1, e.density as i64),
            }
        })
        .collect()
}

fn first_failure(
    max: usize,
    mut residuals_at: impl FnMut(usize) -> Vec<TreeResidual>,
) -> OrderCheck {
    for n in 1..=max {
        let violations: Vec<TreeResidual> =
            residuals_at(n).into_iter().filter(|r| !vanishes(&r.residual)).collect();
        if !violations.is_empty() {
            return OrderCheck {
                order: Order::Finite(n as u32 - 1),
                violations,
            };
        }
    }
    OrderCheck {
        order: Order::AtLeast(max as u32),
        violations: Vec::new(),
    }
}

fn classical_order_with(table: &TreeTable, tab: &ButcherTableau, p_max: usize) -> OrderCheck {
    let phi = ElementaryWeights::for_tableau(table, tab, p_max);
    first_failure(p_max, |n| order_residuals(table, &phi, n))
}

/// Residuals Φ(t) − 1/γ(t) for every tree of order exactly `q`.
pub fn error_constants(tab: &ButcherTableau, q: usize) -> Result<Vec<TreeResidual>> {
    check_cap(q, MAX_TREE_ORDER)?;
    let table = table_for(q)?;
    let phi = ElementaryWeights::for_tableau(&table, tab, q);
    Ok(order_residuals(&table, &phi, q))
}

/// Φ(u)Φ(v) − Φ(u∘v) − Φ(v∘u).
pub fn symplecticity_residual(tab: &ButcherTableau, u: &RootedTree, v: &RootedTree) -> Result<Scalar> {
    let total = u.order() + v.order();
    check_cap(total, MAX_TREE_ORDER)?;
    let table = table_for(total)?;
    let phi = ElementaryWeights::for_tableau(&table, tab, total);
    let id = |t: &RootedTree| table.id(&t.canonicalize()).expect("tree within table");
    let (iu, iv) = (id(u), id(v));
    Ok(pair_residual(&table, &phi, iu, iv))
}

fn pair_residual(table: &TreeTable, phi: &ElementaryWeights, u: usize, v: usize) -> Scalar {
    let uv = table.product_id(u, v).expect("product within table");
    let vu = table.product_id(v, u).expect("product within table");
    phi.phi(u) * phi.phi(v) - phi.phi(uv) - phi.phi(vu)
}

/// Unordered pairs {u, v} of table ids with |u| + |v| = total.
pub fn condition_pairs(table: &TreeTable, total: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for ou in 1..=total / 2 {
        let ov = total - ou;
        for u in table.ids_of_order(ou) {
            for v in table.ids_of_order(ov) {
                if ou < ov || u <= v {
                    pairs.push((u, v));
                }
            }
        }
    }
    pairs
}

/// Number of symplecticity conditions per order 1..=k_max (independent of
/// any tableau).
pub fn condition_counts(k_max: usize) -> Result<Vec<usize>> {
    check_cap(k_max, MAX_ANALYSIS_ORDER)?;
    let table = table_for(k_max)?;
    Ok((1..=k_max)
        .map(|n| if n == 1 { 1 } else { condition_pairs(&table, n).len() })
        .collect())
}

pub fn is_symplectic(tab: &ButcherTableau) -> bool {
    tab.is_exact() && crate::linalg::is_zero_matrix(&m_matrix(tab.a(), tab.b()))
}

/// Pseudosymplecticity order up to `k_max` with the per-order census of
/// satisfied conditions. Exactly symplectic tableaux (M = 0) report
/// [`Order::Infinite`].
pub fn pseudosymplectic_order(tab: &ButcherTableau, k_max: usize) -> Result<PseudosymplecticCheck> {
    check_cap(k_max, MAX_ANALYSIS_ORDER)?;
    let table = table_for(k_max)?;
    Ok(pseudosymplectic_order_with(&table, tab, k_max))
}

fn pseudosymplectic_order_with(table: &TreeTable, tab: &ButcherTableau, k_max: usize) -> PseudosymplecticCheck {
    let phi = ElementaryWeights::for_tableau(table, tab, k_max);
    let symplectic = is_symplectic(tab);
    let mut census = Vec::with_capacity(k_max);
    let mut first_failure: Option<(usize, Vec<PairResidual>)> = None;
    if k_max >= 1 {
        census.push(CensusRow {
            order: 1,
            conditions: 1,
            satisfied: 1,
        });
    }
    for n in 2..=k_max {
        let pairs = condition_pairs(table, n);
        let residuals: Vec<(usize, usize, Scalar)> = pairs
            .par_iter()
            .map(|&(u, v)| (u, v, pair_residual(table, &phi, u, v)))
            .collect();
        let failed: Vec<PairResidual> = residuals
            .into_iter()
            .filter(|(_, _, r)| !vanishes(r))
            .map(|(u, v, residual)| PairResidual {
                u: table.entry(u).tree.clone(),
                v: table.entry(v).tree.clone(),
                residual,
            })
            .collect();
        census.push(CensusRow {
            order: n,
            conditions: pairs.len(),
            satisfied: pairs.len() - failed.len(),
        });
        if first_failure.is_none() && !failed.is_empty() {
            first_failure = Some((n, failed));
        }
    }
    let (order, violations) = match first_failure {
        Some((n, v)) => (Order::Finite(n as u32 - 1), v),
        None if symplectic => (Order::Infinite, Vec::new()),
        None => (Order::AtLeast(k_max as u32), Vec::new()),
    };
    PseudosymplecticCheck {
        order,
        symplectic,
        census,
        violations,
    }
}

/// Tableau of "tab1 with step r1·h, then tab2 with step r2·h".
pub fn compose(tab1: &ButcherTableau, r1: &Scalar, tab2: &ButcherTableau, r2: &Scalar) -> ButcherTableau {
    let (m1, m2) = (tab1.stages(), tab2.stages());
    let m = m1 + m2;
    let mut a = vec![vec![Scalar::zero(); m]; m];
    for i in 0..m1 {
        for j in 0..m1 {
            a[i][j] = r1 * &tab1.a()[i][j];
        }
    }
    let scaled_b1: Vec<Scalar> = tab1.b().iter().map(|x| r1 * x).collect();
    for i in 0..m2 {
        a[m1 + i][..m1].clone_from_slice(&scaled_b1);
        for j in 0..m2 {
            a[m1 + i][m1 + j] = r2 * &tab2.a()[i][j];
        }
    }
    let b = scaled_b1
        .into_iter()
        .chain(tab2.b().iter().map(|x| r2 * x))
        .collect();
    ButcherTableau::from_parts(
        a,
        b,
        Some(TableauMeta {
            construction: Construction::Composed,
            alphas: vec![r1.clone(), r2.clone()],
            scheme: None,
        }),
    )
}

/// φ_{−h} followed by φ_h as one tableau.
pub fn adjoint_composition(tab: &ButcherTableau) -> ButcherTableau {
    compose(tab, &-Scalar::one(), tab, &Scalar::one())
}

/// Largest k ≤ k_max with φ_h ∘ φ_{−h} = id + O(h^{k+1}), i.e. every
/// elementary weight of the composed tableau vanishes through order k.
/// Tableaux invariant under stage reversal report [`Order::Infinite`].
pub fn pseudosymmetry_order(tab: &ButcherTableau, k_max: usize) -> Result<OrderCheck> {
    check_cap(k_max, MAX_ANALYSIS_ORDER)?;
    let table = table_for(k_max)?;
    Ok(pseudosymmetry_order_with(&table, tab, k_max))
}

fn pseudosymmetry_order_with(table: &TreeTable, tab: &ButcherTableau, k_max: usize) -> OrderCheck {
    let composed = adjoint_composition(tab);
    let phi = ElementaryWeights::for_tableau(table, &composed, k_max);
    let mut check = first_failure(k_max, |n| {
        table
            .ids_of_order(n)
            .map(|id| TreeResidual {
                tree: table.entry(id).tree.clone(),
                residual: phi.phi(id).clone(),
            })
            .collect()
    });
    if check.order == Order::AtLeast(k_max as u32) && tab.is_exact() && tab.is_reversal_symmetric() {
        check.order = Order::Infinite;
    }
    check
}

/// Full report with classical order searched to `max_order` and the
/// pseudo-orders to `max_order` (capped at [`MAX_ANALYSIS_ORDER`]).
pub fn analyze(tab: &ButcherTableau, max_order: usize) -> Result<OrderReport> {
    check_cap(max_order, MAX_ANALYSIS_ORDER)?;
    let table = table_for(max_order)?;
    let classical = classical_order_with(&table, tab, max_order);
    let ps = pseudosymplectic_order_with(&table, tab, max_order);
    let sym = pseudosymmetry_order_with(&table, tab, max_order);
    Ok(OrderReport {
        max_order,
        stages: tab.stages(),
        explicit: tab.is_explicit(),
        exact: tab.is_exact(),
        symplectic: ps.symplectic,
        classical_order: classical.order,
        pseudosymplectic_order: ps.order,
        pseudosymmetry_order: sym.order,
        census: ps.census,
        violated_conditions: ViolatedConditions {
            classical: classical.violations,
            pseudosymplectic: ps.violations,
            pseudosymmetry: sym.violations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::{midpoint_projection_tableau, monoimplicit_tableau, CompositionCoefficients};
    use crate::exactnum::Scheme;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn leaf() -> RootedTree {
        RootedTree::leaf()
    }

    fn node(c: Vec<RootedTree>) -> RootedTree {
        RootedTree::from_children(c)
    }

    fn three_stage() -> ButcherTableau {
        midpoint_projection_tableau(&CompositionCoefficients::leapfrog_fractions(Scheme::Leapfrog2)).unwrap()
    }

    #[test]
    fn leapfrog_classical_order_two() {
        let c = classical_order(&three_stage(), 4).unwrap();
        assert_eq!(c.order, Order::Finite(2));
        let tall = c.violations.iter().find(|r| r.tree == node(vec![node(vec![leaf()])])).unwrap();
        assert_eq!(tall.residual, q(1, 8) - q(1, 6));
    }

    #[test]
    fn zero_weights_have_order_zero() {
        let t = ButcherTableau::new(vec![vec![q(0, 1)]], vec![q(0, 1)]).unwrap();
        assert_eq!(classical_order(&t, 3).unwrap().order, Order::Finite(0));
    }

    #[test]
    fn residual_examples() {
        let t = three_stage();
        assert_eq!(symplecticity_residual(&t, &leaf(), &leaf()).unwrap(), q(0, 1));
        assert_eq!(
            symplecticity_residual(&t, &leaf(), &node(vec![leaf()])).unwrap(),
            q(0, 1)
        );
        let euler = ButcherTableau::explicit_euler();
        assert_eq!(symplecticity_residual(&euler, &leaf(), &leaf()).unwrap(), q(1, 1));
    }

    #[test]
    fn euler_orders() {
        let euler = ButcherTableau::explicit_euler();
        assert_eq!(pseudosymplectic_order(&euler, 4).unwrap().order, Order::Finite(1));
        assert_eq!(pseudosymmetry_order(&euler, 4).unwrap().order, Order::Finite(1));
    }

    #[test]
    fn caps() {
        let t = three_stage();
        assert!(matches!(classical_order(&t, 13), Err(Error::OrderLimit { .. })));
        assert!(matches!(pseudosymplectic_order(&t, 12), Err(Error::OrderLimit { .. })));
        assert!(matches!(pseudosymmetry_order(&t, 12), Err(Error::OrderLimit { .. })));
    }

    #[test]
    fn census_counts() {
        assert_eq!(condition_counts(6).unwrap(), vec![1, 1, 1, 3, 6, 16]);
    }

    #[test]
    fn compose_examples() {
        let t = three_stage();
        let c = compose(&t, &q(1, 1), &ButcherTableau::identity(), &q(0, 1));
        assert_eq!((c.a(), c.b()), (t.a(), t.b()));

        let e = ButcherTableau::explicit_euler();
        let half = compose(&e, &q(1, 2), &e, &q(1, 2));
        assert_eq!(half.stages(), 2);
        assert_eq!(classical_order(&half, 3).unwrap().order, Order::Finite(1));
        assert_eq!(elementary(&half, &node(vec![leaf()])), q(1, 4));

        let back = adjoint_composition(&t);
        assert_eq!(back.stages(), 6);
        assert!(crate::tableau::sum(back.b()).is_zero());
    }

    fn elementary(t: &ButcherTableau, tree: &RootedTree) -> Scalar {
        crate::trees::elementary_weight(t, tree)
    }

    #[test]
    fn symplectic_leapfrog_is_infinite() {
        let t = monoimplicit_tableau(&CompositionCoefficients::alternating(Scheme::Leapfrog2)).unwrap();
        let r = analyze(&t, 6).unwrap();
        assert!(r.symplectic);
        assert_eq!(r.pseudosymplectic_order, Order::Infinite);
        assert_eq!(r.pseudosymmetry_order, Order::Infinite);
        assert_eq!(r.classical_order, Order::Finite(2));
    }

    #[test]
    fn order_json() {
        assert_eq!(serde_json::to_string(&Order::Finite(5)).unwrap(), "5");
        assert_eq!(serde_json::to_string(&Order::Infinite).unwrap(), "\"infinite\"");
        assert_eq!(serde_json::to_string(&Order::AtLeast(6)).unwrap(), "{\"at_least\":6}");
    }
}
