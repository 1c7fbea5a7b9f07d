//! Agreement forests and exact desk-scale oracles.
//!
//! The cut oracle deletes k edges of T for k = 0, 1, … and tests whether the
//! induced partition of X is an agreement forest. Each test works on `u128`
//! taxon masks: condition (1) compares the nontrivial splits that both trees
//! induce on a block, condition (2) checks that no edge of T' lies on the
//! embedding of two blocks. In a binary tree two embeddings that share a
//! vertex also share an edge, so edge-disjointness is enough.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::cpt_eligible;
use crate::error::{Error, Result};
use crate::parsimony::BinaryCharacter;
use crate::tbr::tbr_neighbors;
use crate::tree::{EdgeRef, PhyloTree, Taxon};

/// Largest taxon count the mask-based oracles accept.
pub const MAX_ORACLE_TAXA: usize = 128;

/// A partition of X into blocks, kept sorted for stable comparison.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgreementForest {
    pub blocks: Vec<BTreeSet<Taxon>>,
}

impl AgreementForest {
    pub fn new(mut blocks: Vec<BTreeSet<Taxon>>) -> Self {
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        AgreementForest { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// True iff some block contains every taxon of `set`.
    pub fn preserves<S: AsRef<str>>(&self, set: &[S]) -> bool {
        self.blocks
            .iter()
            .any(|b| set.iter().all(|s| b.contains(s.as_ref())))
    }

    pub fn has_singleton(&self, taxon: &str) -> bool {
        self.blocks
            .iter()
            .any(|b| b.len() == 1 && b.contains(taxon))
    }

    pub fn block_of(&self, taxon: &str) -> Option<&BTreeSet<Taxon>> {
        self.blocks.iter().find(|b| b.contains(taxon))
    }
}

/// Result of the exact oracle: `k` plus a forest with `k + 1` blocks, and
/// optionally a character whose parsimony gap certifies `k` from below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceCertificate {
    pub k: usize,
    pub forest: AgreementForest,
    pub character: Option<BinaryCharacter>,
    pub lf_t: Option<usize>,
    pub lf_tprime: Option<usize>,
}

fn ensure_same_taxa(t: &PhyloTree, tp: &PhyloTree) -> Result<()> {
    if t.taxa().eq(tp.taxa()) {
        Ok(())
    } else {
        Err(Error::TaxonMismatch)
    }
}

/// Checks a partition against both agreement-forest conditions using tree
/// restriction and embedding vertex sets directly.
pub fn is_agreement_forest(
    t: &PhyloTree,
    tp: &PhyloTree,
    partition: &[BTreeSet<Taxon>],
) -> Result<bool> {
    ensure_same_taxa(t, tp)?;
    let mut covered = BTreeSet::new();
    for b in partition {
        if b.is_empty() {
            return Err(Error::NotAPartition("empty block".into()));
        }
        for x in b {
            if !t.contains(x.as_str()) {
                return Err(Error::UnknownTaxon(x.to_string()));
            }
            if !covered.insert(x.clone()) {
                return Err(Error::NotAPartition(format!("{x} appears twice")));
            }
        }
    }
    if covered.len() != t.num_taxa() {
        return Err(Error::NotAPartition("blocks do not cover X".into()));
    }
    for b in partition {
        if !t.restrict(b)?.same_topology(&tp.restrict(b)?) {
            return Ok(false);
        }
    }
    for tree in [t, tp] {
        let mut used = BTreeSet::new();
        for b in partition {
            for v in tree.embedding_vertices(b)? {
                if !used.insert(v) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// One tree as a laminar family of taxon masks. The tree is rooted at the
/// leaf of taxon 0; `masks[e]` is the taxon set below edge `e`.
struct MaskTree {
    masks: Vec<u128>,
}

impl MaskTree {
    fn new(tree: &PhyloTree, index: &BTreeMap<Taxon, usize>) -> Self {
        let root = tree.leaf(index.keys().next().unwrap().as_str()).unwrap();
        let n = tree.num_vertices();
        let mut order = Vec::with_capacity(n);
        let mut parent = vec![usize::MAX; n];
        let mut stack = vec![root];
        parent[root] = root;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in tree.neighbors(v) {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        let mut below = vec![0u128; n];
        for &v in order.iter().rev() {
            if let Some(t) = tree.label(v) {
                if v != root {
                    below[v] |= 1u128 << index[t];
                }
            }
            if v != root {
                let p = parent[v];
                below[p] |= below[v];
            }
        }
        let mut masks: Vec<u128> = order
            .iter()
            .filter(|&&v| v != root)
            .map(|&v| below[v])
            .collect();
        masks.sort_by(|a, b| canonical_mask_order(*a, *b));
        MaskTree { masks }
    }

    /// Sorted nontrivial splits of this tree restricted to `block`, each
    /// normalized to the side without the block's lowest taxon.
    fn splits_on(&self, block: u128) -> Vec<u128> {
        let size = block.count_ones();
        let low = block & block.wrapping_neg();
        let mut out: Vec<u128> = self
            .masks
            .iter()
            .filter_map(|&m| {
                let s = m & block;
                let c = s.count_ones();
                if c < 2 || c + 2 > size {
                    return None;
                }
                Some(if s & low != 0 { block ^ s } else { s })
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// True iff no edge lies on the embedding of two blocks.
    fn disjoint(&self, blocks: &[u128]) -> bool {
        self.masks.iter().all(|&m| {
            blocks
                .iter()
                .filter(|&&b| b & m != 0 && b & !m != 0)
                .count()
                <= 1
        })
    }
}

/// Orders edge masks by their ascending taxon-index lists.
fn canonical_mask_order(a: u128, b: u128) -> std::cmp::Ordering {
    let (mut x, mut y) = (a, b);
    loop {
        match (x == 0, y == 0) {
            (true, true) => return std::cmp::Ordering::Equal,
            (true, false) => return std::cmp::Ordering::Less,
            (false, true) => return std::cmp::Ordering::Greater,
            _ => {}
        }
        let (lx, ly) = (x.trailing_zeros(), y.trailing_zeros());
        if lx != ly {
            return lx.cmp(&ly);
        }
        x &= x - 1;
        y &= y - 1;
    }
}

/// Both trees indexed over a shared taxon numbering.
struct Indexed {
    taxa: Vec<Taxon>,
    full: u128,
    t: MaskTree,
    tp: MaskTree,
}

impl Indexed {
    fn new(t: &PhyloTree, tp: &PhyloTree) -> Result<Self> {
        ensure_same_taxa(t, tp)?;
        let n = t.num_taxa();
        if n > MAX_ORACLE_TAXA {
            return Err(Error::Precondition(format!(
                "the exact oracle handles at most {MAX_ORACLE_TAXA} taxa, got {n}"
            )));
        }
        let taxa: Vec<Taxon> = t.taxa().cloned().collect();
        let index: BTreeMap<Taxon, usize> =
            taxa.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
        let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
        Ok(Indexed {
            taxa,
            full,
            t: MaskTree::new(t, &index),
            tp: MaskTree::new(tp, &index),
        })
    }

    /// Blocks induced by deleting the given edges of T.
    fn blocks_for_cut(&self, cut: &[usize]) -> Vec<u128> {
        let masks: Vec<u128> = cut.iter().map(|&i| self.t.masks[i]).collect();
        let mut blocks = Vec::with_capacity(cut.len() + 1);
        let mut top = self.full;
        for (i, &m) in masks.iter().enumerate() {
            top &= !m;
            let mut b = m;
            for (j, &f) in masks.iter().enumerate() {
                if i != j && f & !m == 0 {
                    b &= !f;
                }
            }
            if b != 0 {
                blocks.push(b);
            }
        }
        if top != 0 {
            blocks.push(top);
        }
        blocks
    }

    fn is_forest(&self, blocks: &[u128]) -> bool {
        blocks
            .iter()
            .all(|&b| b.count_ones() <= 3 || self.t.splits_on(b) == self.tp.splits_on(b))
            && self.tp.disjoint(blocks)
            && self.t.disjoint(blocks)
    }

    fn forest(&self, blocks: &[u128]) -> AgreementForest {
        AgreementForest::new(
            blocks
                .iter()
                .map(|&b| {
                    (0..self.taxa.len())
                        .filter(|&i| b >> i & 1 == 1)
                        .map(|i| self.taxa[i].clone())
                        .collect()
                })
                .collect(),
        )
    }

    /// Tests one cut set; `Err` flags a success with too few blocks, which a
    /// smaller k would already have found.
    fn test_cut(&self, cut: &[usize]) -> std::result::Result<Option<Vec<u128>>, Error> {
        let blocks = self.blocks_for_cut(cut);
        if !self.is_forest(&blocks) {
            return Ok(None);
        }
        if blocks.len() != cut.len() + 1 {
            return Err(Error::Invariant(format!(
                "cut of size {} validated with {} blocks",
                cut.len(),
                blocks.len()
            )));
        }
        Ok(Some(blocks))
    }

    /// First validating k-cut in lexicographic order of edge indices.
    fn first_forest(&self, k: usize) -> Result<Option<Vec<u128>>> {
        let m = self.t.masks.len();
        if k > m {
            return Ok(None);
        }
        if k == 0 {
            return self.test_cut(&[]);
        }
        let hits: Vec<Result<Option<Vec<u128>>>> = (0..m)
            .into_par_iter()
            .map(|first| {
                let mut found = None;
                let res = for_each_combination(first + 1, m, k - 1, |rest| {
                    let mut cut = Vec::with_capacity(k);
                    cut.push(first);
                    cut.extend_from_slice(rest);
                    match self.test_cut(&cut) {
                        Ok(Some(b)) => {
                            found = Some(b);
                            Stop::Yes
                        }
                        Ok(None) => Stop::No,
                        Err(e) => {
                            found = None;
                            Stop::Fail(e)
                        }
                    }
                });
                res.map(|_| found)
            })
            .collect();
        for h in hits {
            if let Some(b) = h? {
                return Ok(Some(b));
            }
        }
        Ok(None)
    }

    /// Every validating k-cut, as deduplicated forests.
    fn all_forests(&self, k: usize) -> Result<BTreeSet<AgreementForest>> {
        let m = self.t.masks.len();
        let per_first: Vec<Result<Vec<AgreementForest>>> = (0..m.saturating_sub(k.saturating_sub(1)))
            .into_par_iter()
            .map(|first| {
                let mut out = Vec::new();
                if k == 0 {
                    if first == 0 {
                        if let Some(b) = self.test_cut(&[])? {
                            out.push(self.forest(&b));
                        }
                    }
                    return Ok(out);
                }
                for_each_combination(first + 1, m, k - 1, |rest| {
                    let mut cut = vec![first];
                    cut.extend_from_slice(rest);
                    match self.test_cut(&cut) {
                        Ok(Some(b)) => {
                            out.push(self.forest(&b));
                            Stop::No
                        }
                        Ok(None) => Stop::No,
                        Err(e) => Stop::Fail(e),
                    }
                })?;
                Ok(out)
            })
            .collect();
        let mut all = BTreeSet::new();
        for r in per_first {
            all.extend(r?);
        }
        Ok(all)
    }
}

enum Stop {
    No,
    Yes,
    Fail(Error),
}

/// Calls `f` on every increasing `r`-subset of `start..end` in lexicographic
/// order until it asks to stop.
fn for_each_combination<F>(start: usize, end: usize, r: usize, mut f: F) -> Result<bool>
where
    F: FnMut(&[usize]) -> Stop,
{
    if r == 0 {
        return match f(&[]) {
            Stop::No => Ok(false),
            Stop::Yes => Ok(true),
            Stop::Fail(e) => Err(e),
        };
    }
    if start + r > end {
        return Ok(false);
    }
    let mut idx: Vec<usize> = (start..start + r).collect();
    loop {
        match f(&idx) {
            Stop::No => {}
            Stop::Yes => return Ok(true),
            Stop::Fail(e) => return Err(e),
        }
        let mut i = r;
        loop {
            if i == 0 {
                return Ok(false);
            }
            i -= 1;
            if idx[i] < end - r + i {
                idx[i] += 1;
                for j in i + 1..r {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exact TBR distance by ascending edge-cut enumeration on T. Returns
/// `Ok(None)` when the distance exceeds `k_max`.
pub fn exact_tbr_distance(
    t: &PhyloTree,
    tp: &PhyloTree,
    k_max: usize,
) -> Result<Option<DistanceCertificate>> {
    let ix = Indexed::new(t, tp)?;
    for k in 0..=k_max {
        if let Some(blocks) = ix.first_forest(k)? {
            return Ok(Some(DistanceCertificate {
                k,
                forest: ix.forest(&blocks),
                character: None,
                lf_t: None,
                lf_tprime: None,
            }));
        }
    }
    Ok(None)
}

/// Convenience wrapper returning only the distance.
pub fn tbr_distance(t: &PhyloTree, tp: &PhyloTree, k_max: usize) -> Result<Option<usize>> {
    Ok(exact_tbr_distance(t, tp, k_max)?.map(|c| c.k))
}

/// Exact TBR distance by breadth-first search over TBR neighbourhoods.
pub fn exact_tbr_via_moves(t: &PhyloTree, tp: &PhyloTree, k_max: usize) -> Result<Option<usize>> {
    ensure_same_taxa(t, tp)?;
    Ok(tbr_ball(t, k_max).get(&tp.to_newick()).copied())
}

/// Every tree within `radius` TBR moves of `t`, keyed by canonical Newick,
/// with its distance from `t`.
pub fn tbr_ball(t: &PhyloTree, radius: usize) -> HashMap<String, usize> {
    let mut seen = HashMap::from([(t.to_newick(), 0)]);
    let mut frontier = vec![t.clone()];
    for d in 1..=radius {
        let mut next = Vec::new();
        for tree in &frontier {
            for n in tbr_neighbors(tree) {
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(n.to_newick()) {
                    e.insert(d);
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// All maximum agreement forests.
pub fn enumerate_mafs(t: &PhyloTree, tp: &PhyloTree) -> Result<Vec<AgreementForest>> {
    let ix = Indexed::new(t, tp)?;
    let n = t.num_taxa();
    for k in 0..n {
        if ix.first_forest(k)?.is_some() {
            return Ok(ix.all_forests(k)?.into_iter().collect());
        }
    }
    Err(Error::Invariant("the all-singleton forest always validates".into()))
}

/// Some MAF preserving every chain of `chains` (each chain's taxa inside one
/// block). The chains must be disjoint, common and CPT-eligible.
pub fn maf_preserving<S: AsRef<str>>(
    t: &PhyloTree,
    tp: &PhyloTree,
    chains: &[Vec<S>],
) -> Result<Option<AgreementForest>> {
    let mut used = BTreeSet::new();
    for c in chains {
        if !cpt_eligible(t, tp, c)? {
            return Err(Error::Precondition("chain is not CPT-eligible".into()));
        }
        for x in c {
            if !used.insert(x.as_ref().to_string()) {
                return Err(Error::Precondition("chains overlap".into()));
            }
        }
    }
    Ok(enumerate_mafs(t, tp)?
        .into_iter()
        .find(|f| chains.iter().all(|c| f.preserves(c))))
}

/// True iff some block's embedding in `tree` uses edge `e`.
pub fn forest_uses_edge(tree: &PhyloTree, forest: &AgreementForest, e: EdgeRef) -> Result<bool> {
    for b in &forest.blocks {
        if tree.embedding(b)?.contains(&e) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Some MAF none of whose embeddings in T' uses the edge `e` of T'.
pub fn maf_avoiding_edge(
    t: &PhyloTree,
    tp: &PhyloTree,
    e: EdgeRef,
) -> Result<Option<AgreementForest>> {
    let (u, v) = e.endpoints();
    if !tp.has_edge(u, v) {
        return Err(Error::NotAnEdge(e.to_string()));
    }
    for f in enumerate_mafs(t, tp)? {
        if !forest_uses_edge(tp, &f, e)? {
            return Ok(Some(f));
        }
    }
    Ok(None)
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
    fn combinations_in_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_combination(0, 4, 2, |c| {
            seen.push(c.to_vec());
            Stop::No
        })
        .unwrap();
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn trivial_distances() {
        let a = t("((a,b),(c,d),(e,f));");
        let c = exact_tbr_distance(&a, &a, 3).unwrap().unwrap();
        assert_eq!(c.k, 0);
        assert_eq!(c.forest.blocks, vec![a.taxon_set()]);
        let q1 = t("(a,b,(c,d));");
        let q2 = t("(a,c,(b,d));");
        assert_eq!(tbr_distance(&q1, &q2, 2).unwrap(), Some(1));
        assert_eq!(tbr_distance(&q1, &q2, 0).unwrap(), None);
        assert_eq!(exact_tbr_via_moves(&q1, &q2, 2).unwrap(), Some(1));
    }

    #[test]
    fn forest_checks_agree() {
        let q1 = t("(a,b,(c,d));");
        let q2 = t("(a,c,(b,d));");
        assert!(!is_agreement_forest(&q1, &q2, &[q1.taxon_set()]).unwrap());
        for f in enumerate_mafs(&q1, &q2).unwrap() {
            assert_eq!(f.len(), 2);
            assert!(is_agreement_forest(&q1, &q2, &f.blocks).unwrap());
        }
        assert!(is_agreement_forest(&q1, &q2, &[taxa(["a"]), taxa(["a", "b", "c"])]).is_err());
    }

    #[test]
    fn identical_trees_have_one_maf() {
        let a = t("((a,b),(c,d),(e,f));");
        let mafs = enumerate_mafs(&a, &a).unwrap();
        assert_eq!(mafs.len(), 1);
        let p = a.parent("a");
        let q = *a.neighbors(p).iter().find(|&&w| !a.is_leaf(w)).unwrap();
        assert!(maf_avoiding_edge(&a, &a, EdgeRef::new(p, q)).unwrap().is_none());
    }
}
