//! Conservative eligibility tests for Operation P and Reduction 10.
//!
//! Both tests look for local certificates in the two trees. A `Yes` verdict
//! names the pattern that fired; `NoDontKnow` asserts nothing. The exact
//! mode replaces the catalog by MAF enumeration on small instances.

use serde::{Deserialize, Serialize};

use crate::chain::{cpt_eligible_short_chains, is_chain};
use crate::error::{Error, Result};
use crate::maf::enumerate_mafs;
use crate::tree::{PhyloTree, Taxon};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    NoDontKnow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eligibility {
    pub verdict: Verdict,
    pub matched_pattern: Option<String>,
    pub witness_taxa: Vec<Taxon>,
}

impl Eligibility {
    fn yes(pattern: &str, witness: &[&str]) -> Self {
        Eligibility {
            verdict: Verdict::Yes,
            matched_pattern: Some(pattern.to_string()),
            witness_taxa: witness.iter().map(|s| Taxon::new(s)).collect(),
        }
    }

    fn no() -> Self {
        Eligibility {
            verdict: Verdict::NoDontKnow,
            matched_pattern: None,
            witness_taxa: Vec::new(),
        }
    }

    pub fn is_yes(&self) -> bool {
        self.verdict == Verdict::Yes
    }
}

/// How eligibility for Operation P and Reduction 10 is decided.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum EligibilityMode {
    /// The pattern catalogs only.
    #[default]
    Catalog,
    /// MAF enumeration when |X| ≤ `cap`, the catalogs otherwise.
    Exact { cap: usize },
}

impl EligibilityMode {
    pub const DEFAULT_CAP: usize = 10;

    fn use_exact(&self, n: usize) -> bool {
        matches!(self, EligibilityMode::Exact { cap } if n <= *cap)
    }
}

/// Structural preconditions for Operation P on `(a, b, c, d)`: `y` has
/// cherries {a, b} and {c, d}; `x` has the non-pendant chain (a, b, c, d).
pub fn p_shape(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> bool {
    w.len() == 4
        && y.is_cherry(w[0], w[1])
        && y.is_cherry(w[2], w[3])
        && is_chain(x, w)
        && x.parent(w[0]) != x.parent(w[1])
        && x.parent(w[2]) != x.parent(w[3])
}

/// Structural preconditions for Reduction 10 on `(a, b, c, d)`: `x` has
/// cherries {a, b} and {c, d}; `y` has the pendant 3-chain (a, b, c) with
/// cherry {b, c}.
pub fn r10_shape(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> bool {
    w.len() == 4
        && x.is_cherry(w[0], w[1])
        && x.is_cherry(w[2], w[3])
        && y.is_cherry(w[1], w[2])
        && is_chain(y, &w[..3])
        && y.parent(w[0]) != y.parent(w[1])
}

/// Interior positions of the parents of taxa on a path of one tree.
struct PathIndex<'a> {
    tree: &'a PhyloTree,
    path: Vec<usize>,
}

impl<'a> PathIndex<'a> {
    fn new(tree: &'a PhyloTree, from: &str, to: &str) -> Self {
        PathIndex {
            tree,
            path: tree.path(tree.parent(from), tree.parent(to)),
        }
    }

    /// Index of p_z on the path, if p_z is an interior vertex.
    fn pos(&self, z: &str) -> Option<usize> {
        let p = self.tree.parent(z);
        let n = self.path.len();
        self.path
            .iter()
            .position(|&v| v == p)
            .filter(|&i| i > 0 && i + 1 < n)
    }

    fn last(&self) -> usize {
        self.path.len() - 1
    }
}

/// True iff `v` is the parent of exactly one leaf, namely `e`.
fn lone_parent_of(tree: &PhyloTree, v: usize, e: &str) -> bool {
    let kids = tree.leaf_children(v);
    kids.len() == 1 && kids[0].as_str() == e
}

/// Step 1 shared by both algorithms: some CPT-eligible chain disjoint from
/// the tuple has a member whose parent is interior to the path.
fn step1(x: &PhyloTree, y: &PhyloTree, w: &[&str], idx: &PathIndex) -> Option<Eligibility> {
    for z in cpt_eligible_short_chains(x, y) {
        if z.iter().any(|t| w.contains(&t.as_str())) {
            continue;
        }
        if z.iter().any(|t| idx.pos(t.as_str()).is_some()) {
            let zs: Vec<&str> = z.iter().map(Taxon::as_str).collect();
            return Some(Eligibility::yes("step1", &zs));
        }
    }
    None
}

/// `tree`-path from p_from to p_f has the shape p_from, (w)?, p_e, p_f with
/// the second vertex not `avoid`, p_e ≠ p_f, and p_e carrying only e.
fn short_detour(tree: &PhyloTree, from: &str, avoid: usize, e: &str, f: &str) -> bool {
    let (pe, pf) = (tree.parent(e), tree.parent(f));
    if pe == pf {
        return false;
    }
    let path = tree.path(tree.parent(from), pf);
    let n = path.len();
    (n == 3 || n == 4) && path[1] != avoid && path[n - 2] == pe && lone_parent_of(tree, pe, e)
}

fn others<'a>(tree: &'a PhyloTree, w: &[&str]) -> Vec<&'a str> {
    tree.taxa()
        .map(Taxon::as_str)
        .filter(|t| !w.contains(t))
        .collect()
}

/// Algorithm 1: is `(a, b, c, d)` eligible for Operation P? `x` has the
/// non-pendant chain, `y` has the two cherries.
pub fn algorithm1_eligible(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> Result<Eligibility> {
    if !p_shape(x, y, w) {
        return Err(Error::Precondition(format!("{w:?} does not have the Operation P shape")));
    }
    let (a, b, c, d) = (w[0], w[1], w[2], w[3]);
    let idx = PathIndex::new(y, a, c);
    if let Some(r) = step1(x, y, w, &idx) {
        return Ok(r);
    }
    let rest = others(x, w);
    let (pb, pc) = (x.parent(b), x.parent(c));
    let last = idx.last();

    for &e in &rest {
        for &f in &rest {
            if e == f {
                continue;
            }
            let (Some(ie), Some(jf)) = (idx.pos(e), idx.pos(f)) else { continue };
            if ie < jf && short_detour(x, a, pb, e, f) {
                return Ok(Eligibility::yes("a", &[e, f]));
            }
        }
    }
    for &e in &rest {
        if let Some(ie) = idx.pos(e) {
            if ie <= 2 && is_chain(x, &[e, a, b, c, d]) {
                return Ok(Eligibility::yes("b", &[e]));
            }
        }
    }
    for &e in &rest {
        for &f in &rest {
            if e == f {
                continue;
            }
            let (Some(ie), Some(jf)) = (idx.pos(e), idx.pos(f)) else { continue };
            if ie > jf && short_detour(x, d, pc, e, f) {
                return Ok(Eligibility::yes("c", &[e, f]));
            }
        }
    }
    for &e in &rest {
        if let Some(ie) = idx.pos(e) {
            if ie + 2 >= last && is_chain(x, &[a, b, c, d, e]) {
                return Ok(Eligibility::yes("d", &[e]));
            }
        }
    }
    for &e in &rest {
        for &f in &rest {
            if e == f {
                continue;
            }
            let (Some(ie), Some(jf)) = (idx.pos(e), idx.pos(f)) else { continue };
            if ie < jf && is_chain(x, &[e, a, b, c, d, f]) {
                return Ok(Eligibility::yes("e", &[e, f]));
            }
        }
    }
    for &e in &rest {
        if idx.pos(e).is_some() && is_chain(x, &[e, a, b, c, d]) {
            return Ok(Eligibility::yes("f", &[e]));
        }
    }
    for &e in &rest {
        if idx.pos(e).is_some() && is_chain(x, &[a, b, c, d, e]) {
            return Ok(Eligibility::yes("g", &[e]));
        }
    }
    Ok(Eligibility::no())
}

/// Algorithm 2: is `(a, b, c, d)` eligible for Reduction 10? `x` has the
/// cherries {a, b} and {c, d}, `y` the pendant 3-chain (a, b, c).
pub fn algorithm2_eligible(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> Result<Eligibility> {
    if !r10_shape(x, y, w) {
        return Err(Error::Precondition(format!("{w:?} does not have the Reduction 10 shape")));
    }
    let (a, b, c, d) = (w[0], w[1], w[2], w[3]);
    let idx = PathIndex::new(x, a, c);
    if let Some(r) = step1(x, y, w, &idx) {
        return Ok(r);
    }
    let rest = others(x, w);
    let pb = y.parent(b);
    let pd = y.parent(d);

    for &e in &rest {
        for &f in &rest {
            if e == f {
                continue;
            }
            let (Some(ie), Some(jf)) = (idx.pos(e), idx.pos(f)) else { continue };
            if ie < jf && short_detour(y, a, pb, e, f) {
                return Ok(Eligibility::yes("a", &[e, f]));
            }
        }
    }
    for &e in &rest {
        if idx.pos(e).is_some() && is_chain(y, &[c, b, a, e]) {
            return Ok(Eligibility::yes("b", &[e]));
        }
    }
    for &e in &rest {
        for &f in &rest {
            if e == f {
                continue;
            }
            let (Some(ie), Some(jf)) = (idx.pos(e), idx.pos(f)) else { continue };
            let (pe, pf) = (y.parent(e), y.parent(f));
            if ie > jf
                && y.has_edge(pd, pe)
                && y.has_edge(pe, pf)
                && pf != pd
                && lone_parent_of(y, pe, e)
            {
                return Ok(Eligibility::yes("c", &[e, f]));
            }
        }
    }
    for &e in &rest {
        if idx.pos(e).is_some() && y.is_cherry(d, e) {
            return Ok(Eligibility::yes("d", &[e]));
        }
    }
    for &e in &rest {
        if idx.pos(e).is_some() && short_detour(y, a, pb, e, d) {
            return Ok(Eligibility::yes("g", &[e]));
        }
    }
    if is_chain(y, &[c, b, a, d]) {
        return Ok(Eligibility::yes("j", &[]));
    }
    Ok(Eligibility::no())
}

/// Exact test for Operation P: some MAF preserves {a, b} and {c, d} but not
/// {a, b, c, d}.
pub fn exact_p_eligible(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> Result<Eligibility> {
    if !p_shape(x, y, w) {
        return Err(Error::Precondition(format!("{w:?} does not have the Operation P shape")));
    }
    let hit = enumerate_mafs(x, y)?
        .into_iter()
        .any(|f| f.preserves(&w[..2]) && f.preserves(&w[2..]) && !f.preserves(w));
    Ok(if hit { Eligibility::yes("exact", w) } else { Eligibility::no() })
}

/// Exact test for Reduction 10: some MAF has {c} as a block.
pub fn exact_r10_eligible(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> Result<Eligibility> {
    if !r10_shape(x, y, w) {
        return Err(Error::Precondition(format!("{w:?} does not have the Reduction 10 shape")));
    }
    let hit = enumerate_mafs(x, y)?.into_iter().any(|f| f.has_singleton(w[2]));
    Ok(if hit { Eligibility::yes("exact", w) } else { Eligibility::no() })
}

/// Operation P eligibility under `mode`.
pub fn p_eligible(
    x: &PhyloTree,
    y: &PhyloTree,
    w: &[&str],
    mode: &EligibilityMode,
) -> Result<Eligibility> {
    if mode.use_exact(x.num_taxa()) {
        exact_p_eligible(x, y, w)
    } else {
        algorithm1_eligible(x, y, w)
    }
}

/// Reduction 10 eligibility under `mode`.
pub fn r10_eligible(
    x: &PhyloTree,
    y: &PhyloTree,
    w: &[&str],
    mode: &EligibilityMode,
) -> Result<Eligibility> {
    if mode.use_exact(x.num_taxa()) {
        exact_r10_eligible(x, y, w)
    } else {
        algorithm2_eligible(x, y, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;

    #[test]
    fn shape_checks() {
        let x = parse_newick("((x1,x2),a,(b,(c,(d,(y1,y2)))));").unwrap();
        let y = parse_newick("((a,b),x1,(x2,((c,d),(y1,y2))));").unwrap();
        assert!(p_shape(&x, &y, &["a", "b", "c", "d"]));
        assert!(!p_shape(&y, &x, &["a", "b", "c", "d"]));
        assert!(algorithm1_eligible(&y, &x, &["a", "b", "c", "d"]).is_err());
    }

    #[test]
    fn loop_signature_fires() {
        let x = parse_newick("((a,b),(c,d),(e,f));").unwrap();
        let y = parse_newick("(a,(b,c),(d,(e,f)));").unwrap();
        let w = ["a", "b", "c", "d"];
        assert!(r10_shape(&x, &y, &w));
        let v = algorithm2_eligible(&x, &y, &w).unwrap();
        assert_eq!(v.matched_pattern.as_deref(), Some("j"));
        assert!(exact_r10_eligible(&x, &y, &w).unwrap().is_yes());
    }
}
