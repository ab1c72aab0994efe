use std::collections::HashMap;

use proptest::prelude::*;

use projrk::exactnum::Scalar;
use projrk::tableau::ButcherTableau;
use projrk::trees::{butcher_product, elementary_weight, enumerate_trees, RootedTree};

/// Parenthesis encoding with sorted children; independent of the crate's
/// level-sequence canonical form.
fn shape(children: &[Vec<usize>], v: usize) -> String {
    let mut parts: Vec<String> = children[v].iter().map(|&c| shape(children, c)).collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// Every increasing labeling of every tree with `n` vertices, as parent
/// arrays: vertex i > 0 hangs below some vertex with a smaller label.
fn parent_arrays(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![usize::MAX]];
    for i in 1..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..i).map(move |parent| {
                    let mut q = p.clone();
                    q.push(parent);
                    q
                })
            })
            .collect();
    }
    out
}

fn children_of(parents: &[usize]) -> Vec<Vec<usize>> {
    let mut ch = vec![Vec::new(); parents.len()];
    for (v, &p) in parents.iter().enumerate().skip(1) {
        ch[p].push(v);
    }
    ch
}

fn subtree_size(children: &[Vec<usize>], v: usize) -> u64 {
    1 + children[v].iter().map(|&c| subtree_size(children, c)).sum::<u64>()
}

/// Preorder depths of a labeled tree.
fn levels(children: &[Vec<usize>], v: usize, depth: u8, out: &mut Vec<u8>) {
    out.push(depth);
    for &c in &children[v] {
        levels(children, c, depth + 1, out);
    }
}

#[test]
fn counts_and_labelings_match_brute_force() {
    // A000081
    let expected = [1usize, 1, 2, 4, 9, 20, 48, 115, 286, 719];
    let table = enumerate_trees(10).unwrap();
    assert_eq!(table.counts(), expected.to_vec());
    for n in 1..=9 {
        let mut labelings: HashMap<String, (u64, u64, Vec<u8>)> = HashMap::new();
        for p in parent_arrays(n) {
            let ch = children_of(&p);
            let key = shape(&ch, 0);
            // γ = product of subtree sizes over all vertices
            let gamma: u64 = (0..n).map(|v| subtree_size(&ch, v)).product();
            let mut seq = Vec::new();
            levels(&ch, 0, 0, &mut seq);
            labelings.entry(key).or_insert((0, gamma, seq)).0 += 1;
        }
        assert_eq!(labelings.len(), expected[n - 1], "order {n}");
        let factorial: u64 = (1..=n as u64).product();
        for (count, gamma, seq) in labelings.values() {
            let t = RootedTree::from_level_sequence(seq).unwrap();
            assert_eq!(t.order(), n);
            assert_eq!(t.density(), *gamma, "{t}");
            // increasing labelings of t number n!/(σ(t)γ(t))
            assert_eq!(factorial / (t.symmetry() * t.density()), *count, "{t}");
            assert!(table.id(&t).is_some());
        }
    }
}

#[test]
fn density_and_symmetry_of_small_trees() {
    let leaf = RootedTree::leaf();
    let bush3 = RootedTree::from_children(vec![leaf.clone(), leaf.clone()]);
    let tall3 = RootedTree::from_children(vec![RootedTree::from_children(vec![leaf.clone()])]);
    assert_eq!((bush3.density(), bush3.symmetry()), (3, 2));
    assert_eq!((tall3.density(), tall3.symmetry()), (6, 1));
    let bush4 = RootedTree::from_children(vec![leaf.clone(), leaf.clone(), leaf]);
    assert_eq!((bush4.density(), bush4.symmetry()), (4, 6));
}

fn random_tableau(entries: &[i64], s: usize) -> ButcherTableau {
    let q = |k: usize| Scalar::ratio(entries[k % entries.len()], 7);
    let a = (0..s).map(|i| (0..s).map(|j| q(i * s + j)).collect()).collect();
    let b = (0..s).map(|i| q(s * s + i)).collect();
    ButcherTableau::new(a, b).unwrap()
}

/// Φ(t) = Σ over stage assignments of b_root ∏ over edges a_parent,child,
/// by brute force over all s^|t| assignments.
fn phi_brute(tab: &ButcherTableau, t: &RootedTree) -> Scalar {
    let seq = t.level_sequence();
    let n = seq.len();
    let mut parent = vec![usize::MAX; n];
    let mut stack: Vec<usize> = Vec::new();
    for (v, &l) in seq.iter().enumerate() {
        stack.truncate(l as usize);
        if let Some(&p) = stack.last() {
            parent[v] = p;
        }
        stack.push(v);
    }
    let s = tab.stages();
    let mut total = Scalar::zero();
    let mut idx = vec![0usize; n];
    loop {
        let mut term = tab.b()[idx[0]].clone();
        for v in 1..n {
            term = &term * &tab.a()[idx[parent[v]]][idx[v]];
        }
        total = &total + &term;
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < s {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return total;
        }
    }
}

#[test]
fn elementary_weights_match_brute_force() {
    let tab = random_tableau(&[3, -2, 5, 1, 0, -4, 2, 6, -1, 4, -3, 1], 3);
    let table = enumerate_trees(5).unwrap();
    for e in table.entries() {
        assert_eq!(elementary_weight(&tab, &e.tree), phi_brute(&tab, &e.tree), "{}", e.tree);
    }
}

#[test]
fn explicit_euler_weights() {
    let tab = ButcherTableau::explicit_euler();
    let leaf = RootedTree::leaf();
    assert_eq!(elementary_weight(&tab, &leaf), Scalar::one());
    assert_eq!(elementary_weight(&tab, &butcher_product(&leaf, &leaf)), Scalar::zero());
}

fn tree_strategy() -> impl Strategy<Value = RootedTree> {
    // random parent arrays give every shape with positive probability
    (1usize..=6)
        .prop_flat_map(|n| proptest::collection::vec(any::<u32>(), n - 1))
        .prop_map(|raw| {
            let mut parents = vec![usize::MAX];
            for (i, r) in raw.iter().enumerate() {
                parents.push(*r as usize % (i + 1));
            }
            let ch = children_of(&parents);
            let mut seq = Vec::new();
            levels(&ch, 0, 0, &mut seq);
            RootedTree::from_level_sequence(&seq).unwrap()
        })
}

proptest! {
    #[test]
    fn product_is_canonical(u in tree_strategy(), v in tree_strategy()) {
        let p = butcher_product(&u, &v);
        prop_assert_eq!(p.canonicalize(), p.clone());
        prop_assert_eq!(p.order(), u.order() + v.order());
    }

    #[test]
    fn canonicalize_is_idempotent(t in tree_strategy()) {
        let c = t.canonicalize();
        prop_assert_eq!(c.canonicalize(), c.clone());
        prop_assert_eq!(RootedTree::from_level_sequence(c.level_sequence()).unwrap(), c);
    }

    #[test]
    fn exact_flow_identity(u in tree_strategy(), v in tree_strategy()) {
        // 1/(γ(u)γ(v)) = 1/γ(u∘v) + 1/γ(v∘u)
        let inv = |g: u64| Scalar::ratio(1, g as i64);
        let lhs = inv(u.density() * v.density());
        let rhs = inv(butcher_product(&u, &v).density()) + inv(butcher_product(&v, &u).density());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn exact_flow_identity_exhaustive_to_order_ten() {
    let table = enumerate_trees(9).unwrap();
    let inv = |g: u64| Scalar::ratio(1, g as i64);
    for u in table.entries() {
        for v in table.entries() {
            if u.order + v.order > 10 {
                continue;
            }
            let lhs = inv(u.density * v.density);
            let rhs = inv(butcher_product(&u.tree, &v.tree).density()) + inv(butcher_product(&v.tree, &u.tree).density());
            assert_eq!(lhs, rhs, "{} {}", u.tree, v.tree);
        }
    }
}
