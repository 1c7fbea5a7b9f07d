//! Checks written against the public tree API only. They share no code with
//! the library's oracles, so agreement between the two is evidence.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use tbrkern::{parse_newick, PhyloTree};

pub fn nwk(s: &str) -> PhyloTree {
    parse_newick(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn labels(tree: &PhyloTree) -> BTreeSet<String> {
    tree.taxa().map(|t| t.to_string()).collect()
}

pub fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn leaf(tree: &PhyloTree, label: &str) -> usize {
    tree.leaf(label).unwrap_or_else(|| panic!("no leaf {label}"))
}

/// Labels reachable from `v` without crossing back to `from`.
fn side(tree: &PhyloTree, from: usize, v: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(from, v)];
    while let Some((p, x)) = stack.pop() {
        if let Some(l) = tree.label(x) {
            out.insert(l.to_string());
        }
        for &y in tree.neighbors(x) {
            if y != p {
                stack.push((x, y));
            }
        }
    }
    out
}

/// Nontrivial splits of `tree` restricted to `block`, each as the side
/// without the smallest block taxon.
pub fn restricted_splits(tree: &PhyloTree, block: &BTreeSet<String>) -> BTreeSet<BTreeSet<String>> {
    let min = block.iter().next().cloned();
    let mut out = BTreeSet::new();
    for v in 0..tree.num_vertices() {
        for &w in tree.neighbors(v) {
            if v > w {
                continue;
            }
            let a: BTreeSet<String> = side(tree, v, w).intersection(block).cloned().collect();
            let b: BTreeSet<String> = block.difference(&a).cloned().collect();
            if a.len() < 2 || b.len() < 2 {
                continue;
            }
            out.insert(if a.contains(min.as_ref().unwrap()) { b } else { a });
        }
    }
    out
}

/// Vertices of the smallest subtree connecting the leaves of `block`.
pub fn span(tree: &PhyloTree, block: &BTreeSet<String>) -> BTreeSet<usize> {
    let mut it = block.iter();
    let Some(first) = it.next() else { return BTreeSet::new() };
    let root = leaf(tree, first);
    let mut parent = vec![usize::MAX; tree.num_vertices()];
    parent[root] = root;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &y in tree.neighbors(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut out = BTreeSet::from([root]);
    for l in it {
        let mut x = leaf(tree, l);
        while out.insert(x) {
            x = parent[x];
        }
    }
    out
}

/// Both agreement-forest conditions, checked from first principles.
pub fn is_agreement_forest(t: &PhyloTree, tp: &PhyloTree, blocks: &[BTreeSet<String>]) -> bool {
    let all: BTreeSet<String> = blocks.iter().flatten().cloned().collect();
    let total: usize = blocks.iter().map(BTreeSet::len).sum();
    if all != labels(t) || all != labels(tp) || total != all.len() {
        return false;
    }
    if blocks.iter().any(|b| restricted_splits(t, b) != restricted_splits(tp, b)) {
        return false;
    }
    for tree in [t, tp] {
        let spans: Vec<BTreeSet<usize>> = blocks.iter().map(|b| span(tree, b)).collect();
        for i in 0..spans.len() {
            for j in i + 1..spans.len() {
                if !spans[i].is_disjoint(&spans[j]) {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff some block's connecting subtree in `tree` contains edge {u, v}.
pub fn uses_edge(tree: &PhyloTree, blocks: &[BTreeSet<String>], u: usize, v: usize) -> bool {
    blocks.iter().any(|b| {
        let s = span(tree, b);
        s.contains(&u) && s.contains(&v)
    })
}

/// Parsimony score by two-state Sankoff dynamic programming.
pub fn parsimony(tree: &PhyloTree, f: &BTreeMap<String, u8>) -> usize {
    fn cost(tree: &PhyloTree, f: &BTreeMap<String, u8>, from: usize, v: usize) -> [usize; 2] {
        if let Some(l) = tree.label(v) {
            let s = f[l.as_str()] as usize;
            let mut c = [usize::MAX / 4; 2];
            c[s] = 0;
            return c;
        }
        let mut c = [0, 0];
        for &w in tree.neighbors(v) {
            if w == from {
                continue;
            }
            let sub = cost(tree, f, v, w);
            for (s, cs) in c.iter_mut().enumerate() {
                *cs += sub[s].min(sub[1 - s] + 1);
            }
        }
        c
    }
    let root = (0..tree.num_vertices())
        .find(|&v| !tree.is_leaf(v))
        .expect("tree has an internal vertex");
    let c = cost(tree, f, usize::MAX, root);
    c[0].min(c[1])
}
