//! Rooted trees and elementary weights.
//!
//! A tree is stored as its canonical level sequence: the preorder list of
//! vertex depths (root at depth 0) with the subtrees of every vertex sorted
//! in decreasing lexicographic order, which makes the whole sequence
//! lexicographically maximal among all orderings. Isomorphic trees therefore
//! have identical encodings.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::Scalar;
use crate::tableau::ButcherTableau;

/// Largest tree order the table will enumerate.
pub const MAX_TREE_ORDER: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedTree {
    levels: Vec<u8>,
}

impl RootedTree {
    /// The single-vertex tree •.
    pub fn leaf() -> Self {
        RootedTree { levels: vec![0] }
    }

    /// Tree whose root has the given subtrees.
    pub fn from_children(mut children: Vec<RootedTree>) -> Self {
        children.sort_unstable_by(|a, b| b.cmp(a));
        let mut levels = Vec::with_capacity(1 + children.iter().map(|c| c.order()).sum::<usize>());
        levels.push(0);
        for child in &children {
            levels.extend(child.levels.iter().map(|l| l + 1));
        }
        RootedTree { levels }
    }

    /// Parses any valid preorder level sequence and canonicalizes it.
    pub fn from_level_sequence(seq: &[u8]) -> Result<Self> {
        let valid = seq.first() == Some(&0)
            && seq[1..].iter().all(|&l| l >= 1)
            && seq.windows(2).all(|w| w[1] <= w[0] + 1);
        if !valid {
            return Err(Error::Parse(format!("invalid level sequence {seq:?}")));
        }
        Ok(Self::build(seq))
    }

    fn build(seq: &[u8]) -> Self {
        let children = split_children(seq)
            .into_iter()
            .map(|range| {
                let sub: Vec<u8> = seq[range].iter().map(|l| l - 1).collect();
                Self::build(&sub)
            })
            .collect();
        Self::from_children(children)
    }

    pub fn level_sequence(&self) -> &[u8] {
        &self.levels
    }

    /// Number of vertices.
    pub fn order(&self) -> usize {
        self.levels.len()
    }

    pub fn children(&self) -> Vec<RootedTree> {
        split_children(&self.levels)
            .into_iter()
            .map(|range| RootedTree {
                levels: self.levels[range].iter().map(|l| l - 1).collect(),
            })
            .collect()
    }

    pub fn canonicalize(&self) -> Self {
        Self::build(&self.levels)
    }

    /// γ(t) = |t| · ∏ γ(children).
    pub fn density(&self) -> u64 {
        self.order() as u64 * self.children().iter().map(RootedTree::density).product::<u64>()
    }

    /// σ(t) = ∏ over distinct child shapes of multiplicity! · σ(child)^multiplicity.
    pub fn symmetry(&self) -> u64 {
        let children = self.children();
        let mut result = 1u64;
        let mut i = 0;
        while i < children.len() {
            let mut j = i;
            while j < children.len() && children[j] == children[i] {
                j += 1;
            }
            let mult = (j - i) as u64;
            result *= (1..=mult).product::<u64>() * children[i].symmetry().pow(mult as u32);
            i = j;
        }
        result
    }
}

/// Index ranges of the immediate subtrees within a level sequence.
fn split_children(seq: &[u8]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &l) in seq.iter().enumerate().skip(1) {
        if l == 1 {
            if let Some(s) = start {
                out.push(s..i);
            }
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(s..seq.len());
    }
    out
}

/// u ∘ v: graft `u` onto the root of `v`.
pub fn butcher_product(u: &RootedTree, v: &RootedTree) -> RootedTree {
    let mut children = v.children();
    children.push(u.clone());
    RootedTree::from_children(children)
}

pub fn density(t: &RootedTree) -> u64 {
    t.density()
}

pub fn symmetry(t: &RootedTree) -> u64 {
    t.symmetry()
}

impl fmt::Display for RootedTree {
    /// Bracket notation: `•`, `[•]`, `[•,•]`, `[[•]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let children = self.children();
        if children.is_empty() {
            return f.write_str("•");
        }
        f.write_str("[")?;
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RootedTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct TreeEntry {
    pub tree: RootedTree,
    /// Table indices of the root's subtrees.
    pub children: Vec<usize>,
    pub order: usize,
    pub symmetry: u64,
    pub density: u64,
}

/// All rooted trees up to a given order, indexed and grouped by order.
#[derive(Debug, Clone)]
pub struct TreeTable {
    entries: Vec<TreeEntry>,
    ranges: Vec<Range<usize>>,
    index: HashMap<RootedTree, usize>,
}

impl TreeTable {
    pub fn max_order(&self) -> usize {
        self.ranges.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, id: usize) -> &TreeEntry {
        &self.entries[id]
    }

    pub fn entries(&self) -> &[TreeEntry] {
        &self.entries
    }

    /// Table indices of the trees with exactly `order` vertices.
    pub fn ids_of_order(&self, order: usize) -> Range<usize> {
        if order == 0 || order > self.max_order() {
            return 0..0;
        }
        self.ranges[order - 1].clone()
    }

    pub fn of_order(&self, order: usize) -> &[TreeEntry] {
        &self.entries[self.ids_of_order(order)]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.ranges.iter().map(|r| r.len()).collect()
    }

    pub fn id(&self, tree: &RootedTree) -> Option<usize> {
        self.index.get(tree).copied()
    }

    /// Table index of u ∘ v, if within the table.
    pub fn product_id(&self, u: usize, v: usize) -> Option<usize> {
        self.id(&butcher_product(&self.entries[u].tree, &self.entries[v].tree))
    }
}

/// Enumerates every rooted tree with at most `order_max` vertices.
pub fn enumerate_trees(order_max: usize) -> Result<TreeTable> {
    if order_max == 0 || order_max > MAX_TREE_ORDER {
        return Err(Error::OrderLimit {
            requested: order_max,
            limit: MAX_TREE_ORDER,
        });
    }
    let mut entries: Vec<TreeEntry> = Vec::new();
    let mut ranges: Vec<Range<usize>> = Vec::new();
    let mut index = HashMap::new();
    for n in 1..=order_max {
        let mut layer: Vec<Vec<usize>> = Vec::new();
        // child multisets as nonincreasing id sequences with total order n − 1
        fn fill(
            remaining: usize,
            max_id: usize,
            entries: &[TreeEntry],
            current: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if remaining == 0 {
                out.push(current.clone());
                return;
            }
            for id in (0..=max_id.min(entries.len().saturating_sub(1))).rev() {
                if entries.is_empty() {
                    break;
                }
                let size = entries[id].order;
                if size <= remaining {
                    current.push(id);
                    fill(remaining - size, id, entries, current, out);
                    current.pop();
                }
            }
        }
        fill(n - 1, usize::MAX, &entries, &mut Vec::new(), &mut layer);
        let mut built: Vec<TreeEntry> = layer
            .into_iter()
            .map(|mut children| {
                children.sort_unstable();
                let tree =
                    RootedTree::from_children(children.iter().map(|&c| entries[c].tree.clone()).collect());
                TreeEntry {
                    symmetry: tree.symmetry(),
                    density: tree.density(),
                    order: n,
                    children,
                    tree,
                }
            })
            .collect();
        built.sort_by(|a, b| a.tree.cmp(&b.tree));
        let start = entries.len();
        for e in built {
            index.insert(e.tree.clone(), entries.len());
            entries.push(e);
        }
        ranges.push(start..entries.len());
    }
    Ok(TreeTable {
        entries,
        ranges,
        index,
    })
}

/// Elementary weights Φ(t) = Σᵢ bᵢ Φᵢ(t) of one tableau over a tree table,
/// with Φᵢ(t) = ∏ over subtrees τ of Σⱼ aᵢⱼ Φⱼ(τ).
///
/// Stage products are memoized per (tree, stage) and each order is filled
/// in parallel from the previous ones.
#[derive(Debug, Clone)]
pub struct ElementaryWeights {
    phi: Vec<Scalar>,
    max_order: usize,
}

impl ElementaryWeights {
    pub fn compute(table: &TreeTable, a: &[Vec<Scalar>], b: &[Scalar], max_order: usize) -> Self {
        let max_order = max_order.min(table.max_order());
        let m = b.len();
        let n_trees = table.ids_of_order(max_order).end;
        // g[t][i] = Σⱼ aᵢⱼ Φⱼ(t)
        let mut g: Vec<Vec<Scalar>> = Vec::with_capacity(n_trees);
        let mut phi = Vec::with_capacity(n_trees);
        for order in 1..=max_order {
            let computed: Vec<(Scalar, Vec<Scalar>)> = table
                .ids_of_order(order)
                .into_par_iter()
                .map(|id| {
                    let entry = table.entry(id);
                    let stage: Vec<Scalar> = (0..m)
                        .map(|i| {
                            let mut acc = Scalar::one();
                            for &c in &entry.children {
                                let gi = &g[c][i];
                                if gi.is_zero() {
                                    return Scalar::zero();
                                }
                                acc = acc * gi;
                            }
                            acc
                        })
                        .collect();
                    let total = dot(b, &stage);
                    let g_row = a.iter().map(|row| dot(row, &stage)).collect();
                    (total, g_row)
                })
                .collect();
            for (total, g_row) in computed {
                phi.push(total);
                g.push(g_row);
            }
        }
        ElementaryWeights { phi, max_order }
    }

    pub fn for_tableau(table: &TreeTable, tab: &ButcherTableau, max_order: usize) -> Self {
        Self::compute(table, tab.a(), tab.b(), max_order)
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn phi(&self, id: usize) -> &Scalar {
        &self.phi[id]
    }

    pub fn all(&self) -> &[Scalar] {
        &self.phi
    }
}

fn dot(x: &[Scalar], y: &[Scalar]) -> Scalar {
    x.iter()
        .zip(y)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
}

/// Φ(t) for a single tree.
pub fn elementary_weight(tab: &ButcherTableau, t: &RootedTree) -> Scalar {
    let table = enumerate_trees(t.order()).expect("tree order within the enumeration limit");
    let id = table.id(t).expect("canonical tree is in the table");
    ElementaryWeights::for_tableau(&table, tab, t.order()).phi(id).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf() -> RootedTree {
        RootedTree::leaf()
    }

    fn node(children: Vec<RootedTree>) -> RootedTree {
        RootedTree::from_children(children)
    }

    #[test]
    fn small_counts() {
        let t = enumerate_trees(1).unwrap();
        assert_eq!(t.counts(), vec![1]);
        assert_eq!(t.entry(0).tree, leaf());
        assert_eq!(enumerate_trees(4).unwrap().counts(), vec![1, 1, 2, 4]);
    }

    #[test]
    fn order_limit() {
        assert!(matches!(enumerate_trees(13), Err(Error::OrderLimit { .. })));
        assert!(enumerate_trees(0).is_err());
    }

    #[test]
    fn products() {
        assert_eq!(butcher_product(&leaf(), &leaf()), node(vec![leaf()]));
        assert_eq!(
            butcher_product(&leaf(), &node(vec![leaf()])),
            node(vec![leaf(), leaf()])
        );
        assert_eq!(
            butcher_product(&node(vec![leaf()]), &leaf()),
            node(vec![node(vec![leaf()])])
        );
    }

    #[test]
    fn density_and_symmetry() {
        assert_eq!(leaf().density(), 1);
        assert_eq!(node(vec![leaf()]).density(), 2);
        assert_eq!(node(vec![node(vec![leaf()])]).density(), 6);
        assert_eq!(node(vec![leaf(), leaf()]).density(), 3);
        assert_eq!(leaf().symmetry(), 1);
        assert_eq!(node(vec![leaf(), leaf()]).symmetry(), 2);
        assert_eq!(node(vec![node(vec![leaf()])]).symmetry(), 1);
        // [[•,•],[•,•]]: 2!·2²
        let cherry = node(vec![leaf(), leaf()]);
        assert_eq!(node(vec![cherry.clone(), cherry]).symmetry(), 8);
    }

    #[test]
    fn level_sequences_canonicalize() {
        // [•,[•]] given in the non-maximal order
        let t = RootedTree::from_level_sequence(&[0, 1, 1, 2]).unwrap();
        assert_eq!(t.level_sequence(), &[0, 1, 2, 1]);
        assert_eq!(t.to_string(), "[[•],•]");
        assert!(RootedTree::from_level_sequence(&[0, 2]).is_err());
        assert!(RootedTree::from_level_sequence(&[1]).is_err());
    }

    #[test]
    fn table_children_are_consistent() {
        let table = enumerate_trees(6).unwrap();
        for e in table.entries() {
            let kids: Vec<RootedTree> = e.children.iter().map(|&c| table.entry(c).tree.clone()).collect();
            assert_eq!(RootedTree::from_children(kids), e.tree);
            assert_eq!(e.tree.canonicalize(), e.tree);
        }
    }
}
