//! Chains and common pendant subtrees.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{PhyloTree, Taxon};

/// An n-chain of one host tree, with pendancy flags for that tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Chain {
    pub taxa: Vec<Taxon>,
    pub pendant_left: bool,
    pub pendant_right: bool,
}

impl Chain {
    /// Reads `seq` as a chain of `tree`, or `None` if it is not one.
    pub fn in_tree<S: AsRef<str>>(tree: &PhyloTree, seq: &[S]) -> Option<Chain> {
        if !is_chain(tree, seq) {
            return None;
        }
        let n = seq.len();
        let p = |i: usize| tree.parent(seq[i].as_ref());
        Some(Chain {
            taxa: seq.iter().map(|s| Taxon::new(s.as_ref())).collect(),
            pendant_left: p(0) == p(1),
            pendant_right: p(n - 2) == p(n - 1),
        })
    }

    pub fn len(&self) -> usize {
        self.taxa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taxa.is_empty()
    }

    pub fn is_pendant(&self) -> bool {
        self.pendant_left || self.pendant_right
    }

    pub fn reversed(&self) -> Chain {
        let mut taxa = self.taxa.clone();
        taxa.reverse();
        Chain {
            taxa,
            pendant_left: self.pendant_right,
            pendant_right: self.pendant_left,
        }
    }
}

/// True iff `seq` is an n-chain (n ≥ 2) of `tree`: the parents form a walk
/// in which only the first and last steps may stay put, and no vertex is
/// visited twice.
pub fn is_chain<S: AsRef<str>>(tree: &PhyloTree, seq: &[S]) -> bool {
    let n = seq.len();
    if n < 2 || tree.num_taxa() < 3 {
        return false;
    }
    let mut seen = BTreeSet::new();
    for s in seq {
        if !tree.contains(s.as_ref()) || !seen.insert(s.as_ref()) {
            return false;
        }
    }
    let ps: Vec<usize> = seq.iter().map(|s| tree.parent(s.as_ref())).collect();
    let mut walk = vec![ps[0]];
    for i in 1..n {
        if ps[i] == ps[i - 1] {
            if i != 1 && i != n - 1 {
                return false;
            }
        } else if tree.has_edge(ps[i], ps[i - 1]) {
            walk.push(ps[i]);
        } else {
            return false;
        }
    }
    let distinct: BTreeSet<usize> = walk.iter().copied().collect();
    distinct.len() == walk.len()
}

/// True iff `seq` is a chain of both trees, read in the same order.
pub fn is_common_chain<S: AsRef<str>>(t: &PhyloTree, tp: &PhyloTree, seq: &[S]) -> bool {
    is_chain(t, seq) && is_chain(tp, seq)
}

/// True iff `seq` is a chain of `tree` pendant at either end.
pub fn is_pendant_chain<S: AsRef<str>>(tree: &PhyloTree, seq: &[S]) -> bool {
    Chain::in_tree(tree, seq).is_some_and(|c| c.is_pendant())
}

/// Taxa that could follow the last element of `seq` in a chain.
fn extension_candidates<'a>(tree: &'a PhyloTree, last: &str) -> Vec<&'a Taxon> {
    let p = tree.parent(last);
    let mut out: Vec<&Taxon> = tree.leaf_children(p);
    for &w in tree.neighbors(p) {
        if !tree.is_leaf(w) {
            out.extend(tree.leaf_children(w));
        }
    }
    out.retain(|t| t.as_str() != last);
    out.sort();
    out.dedup();
    out
}

fn ensure_same_taxa(t: &PhyloTree, tp: &PhyloTree) -> Result<()> {
    if t.taxa().eq(tp.taxa()) {
        Ok(())
    } else {
        Err(Error::TaxonMismatch)
    }
}

/// Every oriented n-chain of `tree` (each chain appears in both directions).
pub fn chains(tree: &PhyloTree, n: usize) -> Vec<Vec<Taxon>> {
    let mut out = Vec::new();
    if n < 2 || tree.num_taxa() < 3 {
        return out;
    }
    let mut level: Vec<Vec<Taxon>> = tree.taxa().map(|t| vec![t.clone()]).collect();
    for _ in 1..n {
        let mut next = Vec::new();
        for s in &level {
            for x in extension_candidates(tree, s.last().unwrap().as_str()) {
                if s.contains(x) {
                    continue;
                }
                let mut ext = s.clone();
                ext.push(x.clone());
                if is_chain(tree, &ext) {
                    next.push(ext);
                }
            }
        }
        level = next;
    }
    out.extend(level);
    out.sort();
    out
}

/// Every oriented common chain of length exactly `n`, sorted.
pub fn common_chains(t: &PhyloTree, tp: &PhyloTree, n: usize) -> Vec<Vec<Taxon>> {
    let mut out: Vec<Vec<Taxon>> = chains(t, n)
        .into_iter()
        .filter(|c| is_chain(tp, c))
        .collect();
    out.sort();
    out
}

/// All oriented common chains of every length ≥ 2, grouped by length.
fn all_common_chains(t: &PhyloTree, tp: &PhyloTree) -> Vec<Vec<Vec<Taxon>>> {
    let mut levels = vec![Vec::new(), Vec::new(), common_chains(t, tp, 2)];
    loop {
        let mut next = Vec::new();
        for s in levels.last().unwrap() {
            for x in extension_candidates(t, s.last().unwrap().as_str()) {
                if s.contains(x) {
                    continue;
                }
                let mut ext = s.clone();
                ext.push(x.clone());
                if is_common_chain(t, tp, &ext) {
                    next.push(ext);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        next.sort();
        levels.push(next);
    }
}

/// Maximal common chains of length at least `n_min`, one entry per chain.
/// Orientation puts the smaller endpoint label first; the pair holds the
/// chain as seen in `t` and in `tp`.
pub fn find_maximal_common_chains(
    t: &PhyloTree,
    tp: &PhyloTree,
    n_min: usize,
) -> Result<Vec<(Chain, Chain)>> {
    ensure_same_taxa(t, tp)?;
    let levels = all_common_chains(t, tp);
    let extendable = |s: &[Taxon]| {
        extension_candidates(t, s.last().unwrap().as_str())
            .into_iter()
            .any(|x| {
                if s.contains(x) {
                    return false;
                }
                let mut ext = s.to_vec();
                ext.push(x.clone());
                is_common_chain(t, tp, &ext)
            })
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for level in levels.iter().skip(n_min.max(2)) {
        for s in level {
            let mut rev = s.clone();
            rev.reverse();
            if extendable(s) || extendable(&rev) {
                continue;
            }
            let oriented = if s.first() < s.last() { s.clone() } else { rev };
            if seen.insert(oriented.clone()) {
                out.push((
                    Chain::in_tree(t, &oriented).unwrap(),
                    Chain::in_tree(tp, &oriented).unwrap(),
                ));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// CPT eligibility of a common chain: length at least three, or a 2-chain
/// that is pendant in at least one tree.
pub fn cpt_eligible<S: AsRef<str>>(t: &PhyloTree, tp: &PhyloTree, chain: &[S]) -> Result<bool> {
    let (Some(a), Some(b)) = (Chain::in_tree(t, chain), Chain::in_tree(tp, chain)) else {
        return Err(Error::Precondition("chain is not common to both trees".into()));
    };
    Ok(chain.len() >= 3 || a.is_pendant() || b.is_pendant())
}

/// Every CPT-eligible common 2- or 3-chain, one orientation each.
pub fn cpt_eligible_short_chains(t: &PhyloTree, tp: &PhyloTree) -> Vec<Vec<Taxon>> {
    let mut out = Vec::new();
    for n in [2, 3] {
        for c in common_chains(t, tp, n) {
            if c.first() < c.last() && cpt_eligible(t, tp, &c).unwrap_or(false) {
                out.push(c);
            }
        }
    }
    out
}

/// Taxon set and canonical rooted shape of every pendant subtree, keyed by
/// the sorted taxon list.
fn pendant_subtrees(tree: &PhyloTree) -> BTreeMap<Vec<Taxon>, String> {
    fn visit(
        tree: &PhyloTree,
        from: usize,
        v: usize,
        memo: &mut HashMap<(usize, usize), (Vec<Taxon>, String)>,
    ) -> (Vec<Taxon>, String) {
        if let Some(r) = memo.get(&(from, v)) {
            return r.clone();
        }
        let r = if let Some(t) = tree.label(v) {
            (vec![t.clone()], t.to_string())
        } else {
            let mut parts: Vec<(Vec<Taxon>, String)> = tree
                .neighbors(v)
                .iter()
                .filter(|&&w| w != from)
                .map(|&w| visit(tree, v, w, memo))
                .collect();
            parts.sort_by(|a, b| a.0[0].cmp(&b.0[0]));
            let mut set: Vec<Taxon> = parts.iter().flat_map(|p| p.0.iter().cloned()).collect();
            set.sort();
            let body: Vec<&str> = parts.iter().map(|p| p.1.as_str()).collect();
            (set, format!("({})", body.join(",")))
        };
        memo.insert((from, v), r.clone());
        r
    }
    let mut memo = HashMap::new();
    let mut out = BTreeMap::new();
    for e in tree.edges() {
        let (a, b) = e.endpoints();
        for (from, to) in [(a, b), (b, a)] {
            let (set, shape) = visit(tree, from, to, &mut memo);
            out.insert(set, shape);
        }
    }
    out
}

/// Every common pendant subtree Y with 2 ≤ |Y| ≤ |X| − 2, as sorted taxa.
pub fn common_pendant_subtrees(t: &PhyloTree, tp: &PhyloTree) -> Result<Vec<Vec<Taxon>>> {
    ensure_same_taxa(t, tp)?;
    let n = t.num_taxa();
    if n < 4 {
        return Ok(Vec::new());
    }
    let a = pendant_subtrees(t);
    let b = pendant_subtrees(tp);
    Ok(a.into_iter()
        .filter(|(set, shape)| set.len() >= 2 && set.len() + 2 <= n && b.get(set) == Some(shape))
        .map(|(set, _)| set)
        .collect())
}

/// Maximal common pendant subtrees with at least two leaves whose removal
/// leaves at least two other taxa. For distinct trees the result is a family
/// of disjoint sets; for identical trees complementary sides overlap.
pub fn find_maximal_common_pendant_subtrees(
    t: &PhyloTree,
    tp: &PhyloTree,
) -> Result<Vec<BTreeSet<Taxon>>> {
    let common: Vec<BTreeSet<Taxon>> = common_pendant_subtrees(t, tp)?
        .into_iter()
        .map(|v| v.into_iter().collect())
        .collect();
    let mut out: Vec<BTreeSet<Taxon>> = common
        .iter()
        .filter(|y| !common.iter().any(|z| z.len() > y.len() && y.is_subset(z)))
        .cloned()
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;
    use crate::tree::taxa;

    fn t(s: &str) -> PhyloTree {
        parse_newick(s).unwrap()
    }

    #[test]
    fn chain_walk_rules() {
        let cat = t("(l1,l2,(l3,(l4,(l5,l6))));");
        assert!(is_chain(&cat, &["l1", "l2", "l3", "l4", "l5", "l6"]));
        let c = Chain::in_tree(&cat, &["l1", "l2", "l3"]).unwrap();
        assert!(c.pendant_left && !c.pendant_right);
        // Interior parents must be distinct.
        assert!(!is_chain(&cat, &["l3", "l1", "l2", "l4"]));
        assert!(!is_chain(&cat, &["l1", "l3"]) || cat.has_edge(cat.parent("l1"), cat.parent("l3")));
        assert!(!is_chain(&cat, &["l1", "l4"]));
    }

    #[test]
    fn caterpillars_share_long_chain() {
        let a = t("((x,y),l1,(l2,(l3,(l4,(l5,(l6,(p,q)))))));");
        let b = t("((x,p),l1,(l2,(l3,(l4,(l5,(l6,(y,q)))))));");
        let found = find_maximal_common_chains(&a, &b, 4).unwrap();
        let lens: Vec<usize> = found.iter().map(|c| c.0.len()).collect();
        // x and q extend the caterpillar spine at both ends.
        assert_eq!(lens, vec![8], "{found:?}");
        let names: Vec<&str> = found[0].0.taxa.iter().map(Taxon::as_str).collect();
        assert_eq!(names, ["q", "l6", "l5", "l4", "l3", "l2", "l1", "x"]);
    }

    #[test]
    fn quartet_swap_has_no_shared_structure() {
        let a = t("(a,b,(c,d));");
        let b = t("(a,c,(b,d));");
        assert!(common_chains(&a, &b, 2).iter().all(|c| !a.is_cherry(c[0].as_str(), c[1].as_str())
            || !b.is_cherry(c[0].as_str(), c[1].as_str())));
        assert!(find_maximal_common_pendant_subtrees(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn single_shared_cherry() {
        let a = t("((a,b),c,(d,(e,f)));");
        let b = t("((a,b),d,(c,(f,e)));");
        let b2 = t("((a,b),e,(c,(d,f)));");
        assert_eq!(find_maximal_common_pendant_subtrees(&a, &b2).unwrap(), vec![taxa(["a", "b"])]);
        let found = find_maximal_common_pendant_subtrees(&a, &b).unwrap();
        assert!(found.contains(&taxa(["a", "b"])));
    }

    #[test]
    fn identical_trees_report_maximal_sides() {
        let a = t("((a,b),(c,d),(e,f));");
        let found = find_maximal_common_pendant_subtrees(&a, &a).unwrap();
        assert!(found.contains(&taxa(["a", "b", "c", "d"])));
        assert!(found.iter().all(|y| y.len() == 4));
    }

    #[test]
    fn cpt_eligibility() {
        let a = t("((a,b),c,(d,(e,f)));");
        let b = t("((a,c),b,(d,(f,e)));");
        assert!(cpt_eligible(&a, &b, &["d", "e", "f"]).unwrap());
        assert!(cpt_eligible(&a, &b, &["e", "f"]).unwrap());
        assert!(cpt_eligible(&a, &b, &["x", "y"]).is_err());
        let c = t("((x,a),b,(c,(y,z)));");
        let d = t("((x,z),b,(c,(y,a)));");
        // (b,c) is a common 2-chain pendant in neither tree.
        assert!(!cpt_eligible(&c, &d, &["b", "c"]).unwrap());
    }
}
