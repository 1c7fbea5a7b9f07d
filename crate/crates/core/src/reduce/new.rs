//! Reduction 8 (with its first half 8A), Operation P, Reductions 9.1/9.2
//! and Reduction 10, plus interrupted 4-chain detection.

use serde::{Deserialize, Serialize};

use crate::chain::{chains, common_chains, is_chain, is_common_chain};
use crate::error::{Error, Result};
use crate::pair::{Orient, TreePair};
use crate::reduce::classic::{extend_chain_in_tree, replace_subtree, End};
use crate::reduce::eligibility::{p_eligible, p_shape, r10_eligible, r10_shape, Eligibility};
use crate::reduce::{all_distinct, to_taxa, Applied, KernelConfig, ReductionEvent, Rule};
use crate::tree::{EdgeRef, Editor, PhyloTree, Taxon};

/// A 4-chain of T that is broken in T' by one extra edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterruptedChain {
    pub chain: Vec<Taxon>,
    /// Edge {u, v} of T' where v sits between p_b and p_c.
    pub interrupter: EdgeRef,
}

/// All interrupted 4-chains of (t, tp), one orientation each.
pub fn find_interrupted_4chains(t: &PhyloTree, tp: &PhyloTree) -> Result<Vec<InterruptedChain>> {
    if !t.taxa().eq(tp.taxa()) {
        return Err(Error::TaxonMismatch);
    }
    let mut out = Vec::new();
    for c in chains(t, 4) {
        if c[0] > c[3] {
            continue;
        }
        let p = |i: usize| tp.parent(c[i].as_str());
        let (pa, pb, pc, pd) = (p(0), p(1), p(2), p(3));
        if pb == pc {
            continue;
        }
        let Some(&v) = tp
            .neighbors(pb)
            .iter()
            .find(|&&v| v != pc && tp.has_edge(v, pc))
        else {
            continue;
        };
        let step = |x: usize, y: usize| x == y || tp.has_edge(x, y);
        if !step(pa, pb) || !step(pc, pd) {
            continue;
        }
        let mut walk = vec![pa, pb, v, pc, pd];
        walk.dedup();
        let mut sorted = walk.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != walk.len() {
            continue;
        }
        let u = *tp
            .neighbors(v)
            .iter()
            .find(|&&u| u != pb && u != pc)
            .expect("internal vertex has degree three");
        out.push(InterruptedChain {
            chain: c,
            interrupter: EdgeRef::new(u, v),
        });
    }
    Ok(out)
}

fn strs(v: &[Taxon]) -> Vec<&str> {
    v.iter().map(Taxon::as_str).collect()
}

/// The C-part of Reduction 8A for `(a, b, c, d)` with `x` in the role of T:
/// (b, c, d) is common, pendant in `y` with cherry {b, c} and not pendant in
/// `x`; (a, b, c, d) is a chain of `x` with p_a ≠ p_b and not a chain of `y`.
pub fn r8_c_ok(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> bool {
    if w.len() != 4 || !all_distinct(w) {
        return false;
    }
    let (a, b, c, d) = (w[0], w[1], w[2], w[3]);
    is_common_chain(x, y, &w[1..])
        && y.is_cherry(b, c)
        && x.parent(b) != x.parent(c)
        && x.parent(c) != x.parent(d)
        && is_chain(x, w)
        && x.parent(a) != x.parent(b)
        && !is_chain(y, w)
}

/// Secondary-chain check: `d` is a common 3-chain and {f, g} is a cherry in
/// neither tree.
fn d_ok(x: &PhyloTree, y: &PhyloTree, d: &[&str]) -> bool {
    d.len() == 3 && is_common_chain(x, y, d) && !x.is_cherry(d[1], d[2]) && !y.is_cherry(d[1], d[2])
}

/// Orients a common 3-chain for use as the secondary chain, if possible.
fn orient_d<'a>(x: &PhyloTree, y: &PhyloTree, d: &[&'a str]) -> Option<Vec<&'a str>> {
    let fwd = d.to_vec();
    let mut rev = d.to_vec();
    rev.reverse();
    [fwd, rev].into_iter().find(|o| d_ok(x, y, o))
}

/// Reduction 8A for witness `(a, b, c, d, e, f, g)` with T in role `o`.
/// Returns trees on X plus one fresh taxon in which {b, c, d} is a common
/// pendant subtree.
pub fn reduce8a(pair: &TreePair, o: Orient, w: &[&str]) -> Result<Option<TreePair>> {
    if w.len() != 7 || !all_distinct(w) {
        return Ok(None);
    }
    let (x, y) = pair.oriented(o);
    if !r8_c_ok(x, y, &w[..4]) || !d_ok(x, y, &w[4..]) {
        return Ok(None);
    }
    let (a, b, c, d) = (w[0], w[1], w[2], w[3]);
    let (e, f, g) = (w[4], w[5], w[6]);
    let mut out = pair.clone();
    let g2 = out.fresh();
    let x_ext = extend_chain_in_tree(x, &w[4..], std::slice::from_ref(&g2), End::Right)?;
    let y_ext = extend_chain_in_tree(y, &w[4..], std::slice::from_ref(&g2), End::Right)?;

    let mut ed = Editor::new(&x_ext);
    let (pa, pb) = (x_ext.parent(a), x_ext.parent(b));
    ed.disconnect(pa, pb)?;
    ed.suppress(pa);
    ed.suppress(pb);
    let v = ed.subdivide(x_ext.parent(f), x_ext.parent(g))?;
    let with_e = ed.component(x_ext.leaf_of(e));
    let other_root = if with_e.contains(&x_ext.leaf_of(a)) {
        x_ext.leaf_of(b)
    } else {
        x_ext.leaf_of(a)
    };
    let comp = ed.component(other_root);
    let mut best: Option<PhyloTree> = None;
    for &p in &comp {
        for &q in &ed.adj[p] {
            if p > q {
                continue;
            }
            let mut trial = ed.clone();
            let u = trial.subdivide(p, q)?;
            trial.connect(u, v);
            let cand = trial.finish()?;
            let ok = cand.is_cherry(b, c)
                && cand.parent(d) != cand.parent(c)
                && cand.has_edge(cand.parent(c), cand.parent(d));
            if ok && best.as_ref().is_none_or(|bt| cand.to_newick() < bt.to_newick()) {
                best = Some(cand);
            }
        }
    }
    let Some(x_r) = best else {
        return Ok(None);
    };
    let rebuilt = out.rebuild(o, x_r, y_ext)?;
    Ok(Some(rebuilt))
}

/// Reduction 8: 8A on `(a, b, c, d, e, f, g)` followed by Reduction 1 on
/// {b, c, d}.
pub fn apply_r8(pair: &TreePair, o: Orient, w: &[&str]) -> Result<Option<Applied>> {
    let Some(mid) = reduce8a(pair, o, w)? else {
        return Ok(None);
    };
    let Some((out, z)) = replace_subtree(&mid, &w[1..4])? else {
        return Err(Error::Invariant(format!(
            "8A on {w:?} did not create a common pendant subtree"
        )));
    };
    let ev = ReductionEvent {
        rule: Rule::R8,
        orient: o,
        witness: to_taxa(w),
        delta_k: 0,
        taxa_removed: 1,
        pattern: None,
        description: format!("side {}|{}{}{} collapsed into {z}", w[0], w[1], w[2], w[3]),
    };
    Ok(Some((out, ev)))
}

/// Every `(a, b, c, d)` satisfying the C-part of 8A with T in role `o`.
fn r8_c_candidates(x: &PhyloTree, y: &PhyloTree) -> Vec<Vec<Taxon>> {
    let mut out = Vec::new();
    for c in common_chains(x, y, 3) {
        if !y.is_cherry(c[0].as_str(), c[1].as_str()) {
            continue;
        }
        for a in x.taxa() {
            let mut w = vec![a.clone()];
            w.extend(c.iter().cloned());
            if r8_c_ok(x, y, &strs(&w)) {
                out.push(w);
            }
        }
    }
    out.sort();
    out
}

/// Common 3-chains disjoint from `avoid`, each in a usable orientation.
fn d_candidates(x: &PhyloTree, y: &PhyloTree, avoid: &[&str]) -> Vec<Vec<Taxon>> {
    let mut out: Vec<Vec<Taxon>> = common_chains(x, y, 3)
        .into_iter()
        .filter(|d| d.iter().all(|t| !avoid.contains(&t.as_str())))
        .filter(|d| d_ok(x, y, &strs(d)))
        .collect();
    out.sort();
    out
}

pub fn reduce8(pair: &TreePair) -> Result<Option<Applied>> {
    for o in Orient::BOTH {
        let (x, y) = pair.oriented(o);
        for cw in r8_c_candidates(x, y) {
            let cs = strs(&cw);
            for dw in d_candidates(x, y, &cs) {
                let mut w = cs.clone();
                w.extend(strs(&dw));
                if let Some(r) = apply_r8(pair, o, &w)? {
                    return Ok(Some(r));
                }
            }
        }
    }
    Ok(None)
}

/// Every tuple with the Operation P shape, T in role `o`.
pub fn p_tuples(x: &PhyloTree, y: &PhyloTree) -> Vec<Vec<Taxon>> {
    let cherries = y.cherries();
    let mut out = Vec::new();
    for (i, (p, q)) in cherries.iter().enumerate() {
        for (j, (r, s)) in cherries.iter().enumerate() {
            if i == j {
                continue;
            }
            for (a, b) in [(p, q), (q, p)] {
                for (c, d) in [(r, s), (s, r)] {
                    let w = [a.as_str(), b.as_str(), c.as_str(), d.as_str()];
                    if p_shape(x, y, &w) {
                        out.push(to_taxa(&w));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Operation P on `(a, b, c, d)` with T in role `o`, after an eligibility
/// check. Only T' changes: b moves from its cherry with a to a cherry with c.
pub fn operation_p(
    pair: &TreePair,
    o: Orient,
    w: &[&str],
    cfg: &KernelConfig,
) -> Result<Option<(TreePair, Eligibility)>> {
    let (x, y) = pair.oriented(o);
    if !all_distinct(w) || !p_shape(x, y, w) {
        return Ok(None);
    }
    let verdict = p_eligible(x, y, w, &cfg.eligibility)?;
    if !verdict.is_yes() {
        return Ok(None);
    }
    Ok(Some((pair.rebuild(o, x.clone(), rewire_p(y, w)?)?, verdict)))
}

/// The T'-side rewiring of Operation P, without any checks.
pub(crate) fn rewire_p(y: &PhyloTree, w: &[&str]) -> Result<PhyloTree> {
    let (b, c) = (w[1], w[2]);
    let lb = y.leaf_of(b);
    let pb = y.parent(b);
    let lc = y.leaf_of(c);
    let pc = y.parent(c);
    let mut ed = Editor::new(y);
    ed.disconnect(lb, pb)?;
    ed.suppress(pb);
    let v = ed.subdivide(lc, pc)?;
    ed.connect(v, lb);
    ed.finish()
}

pub fn apply_op_p(
    pair: &TreePair,
    o: Orient,
    w: &[&str],
    cfg: &KernelConfig,
) -> Result<Option<Applied>> {
    let Some((out, verdict)) = operation_p(pair, o, w, cfg)? else {
        return Ok(None);
    };
    let ev = ReductionEvent {
        rule: Rule::OpP,
        orient: o,
        witness: to_taxa(w),
        delta_k: 0,
        taxa_removed: 0,
        pattern: verdict.matched_pattern,
        description: format!("{} moved next to {}", w[1], w[2]),
    };
    Ok(Some((out, ev)))
}

fn r9_event(o: Orient, w: &[&str], pattern: String, z: &Taxon) -> ReductionEvent {
    ReductionEvent {
        rule: Rule::R9,
        orient: o,
        witness: to_taxa(w),
        delta_k: 0,
        taxa_removed: 1,
        pattern: Some(pattern),
        description: format!("Operation P then Reduction 8, leaving {z}"),
    }
}

/// Finishes a Reduction 9 pipeline: 8A with C-part `c` in role `o` and
/// secondary chain `d`, then Reduction 1.
fn finish_with_r8(
    pair: &TreePair,
    o: Orient,
    c: &[&str],
    d: &[&str],
) -> Result<Option<(TreePair, Taxon)>> {
    let (x, y) = pair.oriented(o);
    let Some(dd) = orient_d(x, y, d) else {
        return Ok(None);
    };
    let mut w = c.to_vec();
    w.extend(dd);
    let Some(mid) = reduce8a(pair, o, &w)? else {
        return Ok(None);
    };
    replace_subtree(&mid, &c[1..])
}

/// Reduction 9.1 on `(a, b, c, d, a', b', c', d')`: the first four taxa
/// satisfy the C-part of 8A in role `o`, the last four are eligible for
/// Operation P in some role.
fn apply_r9_1(
    pair: &TreePair,
    o: Orient,
    w: &[&str],
    cfg: &KernelConfig,
) -> Result<Option<Applied>> {
    let (x, y) = pair.oriented(o);
    if w.len() != 8 || !all_distinct(w) || !r8_c_ok(x, y, &w[..4]) {
        return Ok(None);
    }
    for po in Orient::BOTH {
        let Some((mid, verdict)) = operation_p(pair, po, &w[4..], cfg)? else {
            continue;
        };
        let (mx, my) = mid.oriented(o);
        if !r8_c_ok(mx, my, &w[..4]) {
            continue;
        }
        if let Some((out, z)) = finish_with_r8(&mid, o, &w[..4], &w[5..])? {
            let pattern = format!(
                "9.1;P={:?};{}",
                po,
                verdict.matched_pattern.unwrap_or_default()
            );
            return Ok(Some((out, r9_event(o, w, pattern, &z))));
        }
    }
    Ok(None)
}

/// Reduction 9.2 on two disjoint tuples, the first taken in role `o`.
/// Either the whole pipeline runs or nothing changes.
fn apply_r9_2(
    pair: &TreePair,
    o: Orient,
    w: &[&str],
    cfg: &KernelConfig,
) -> Result<Option<Applied>> {
    if w.len() != 8 || !all_distinct(w) {
        return Ok(None);
    }
    let Some((mid, v1)) = operation_p(pair, o, &w[..4], cfg)? else {
        return Ok(None);
    };
    for o2 in Orient::BOTH {
        let (x0, y0) = pair.oriented(o2);
        if !p_shape(x0, y0, &w[4..]) || !p_eligible(x0, y0, &w[4..], &cfg.eligibility)?.is_yes() {
            continue;
        }
        let Some((mid2, v2)) = operation_p(&mid, o2, &w[4..], cfg)? else {
            continue;
        };
        if let Some((out, z)) = finish_with_r8(&mid2, o, &w[..4], &w[5..])? {
            let pattern = format!(
                "9.2;P={:?};{}/{}",
                o2,
                v1.matched_pattern.clone().unwrap_or_default(),
                v2.matched_pattern.unwrap_or_default()
            );
            return Ok(Some((out, r9_event(o, w, pattern, &z))));
        }
    }
    Ok(None)
}

/// Reduction 9 on a recorded witness. `variant` is the event's pattern
/// string; it selects 9.1 or 9.2.
pub fn apply_r9(
    pair: &TreePair,
    o: Orient,
    w: &[&str],
    variant: Option<&str>,
    cfg: &KernelConfig,
) -> Result<Option<Applied>> {
    match variant {
        Some(p) if p.starts_with("9.1") => apply_r9_1(pair, o, w, cfg),
        Some(p) if p.starts_with("9.2") => apply_r9_2(pair, o, w, cfg),
        _ => Ok(None),
    }
}

/// Every structurally valid Operation P tuple that is eligible, with role.
fn eligible_p_tuples(pair: &TreePair, cfg: &KernelConfig) -> Result<Vec<(Orient, Vec<Taxon>)>> {
    let mut out = Vec::new();
    for po in Orient::BOTH {
        let (x, y) = pair.oriented(po);
        for t in p_tuples(x, y) {
            if p_eligible(x, y, &strs(&t), &cfg.eligibility)?.is_yes() {
                out.push((po, t));
            }
        }
    }
    Ok(out)
}

pub fn reduce9(pair: &TreePair, cfg: &KernelConfig) -> Result<Option<Applied>> {
    let tuples = eligible_p_tuples(pair, cfg)?;
    if tuples.is_empty() {
        return Ok(None);
    }
    let disjoint = |a: &[Taxon], b: &[Taxon]| a.iter().all(|t| !b.contains(t));
    for o in Orient::BOTH {
        let (x, y) = pair.oriented(o);
        for cw in r8_c_candidates(x, y) {
            for (_, t) in &tuples {
                if !disjoint(&cw, t) {
                    continue;
                }
                let mut w = strs(&cw);
                w.extend(strs(t));
                if let Some(r) = apply_r9_1(pair, o, &w, cfg)? {
                    return Ok(Some(r));
                }
            }
        }
    }
    for (o1, t1) in &tuples {
        for (_, t2) in &tuples {
            if !disjoint(t1, t2) {
                continue;
            }
            let mut w = strs(t1);
            w.extend(strs(t2));
            if let Some(r) = apply_r9_2(pair, *o1, &w, cfg)? {
                return Ok(Some(r));
            }
        }
    }
    Ok(None)
}

/// Every tuple with the Reduction 10 shape, T in role `o`.
pub fn r10_tuples(x: &PhyloTree, y: &PhyloTree) -> Vec<Vec<Taxon>> {
    let cherries = x.cherries();
    let mut out = Vec::new();
    for (i, (p, q)) in cherries.iter().enumerate() {
        for (j, (r, s)) in cherries.iter().enumerate() {
            if i == j {
                continue;
            }
            for (a, b) in [(p, q), (q, p)] {
                for (c, d) in [(r, s), (s, r)] {
                    let w = [a.as_str(), b.as_str(), c.as_str(), d.as_str()];
                    if r10_shape(x, y, &w) {
                        out.push(to_taxa(&w));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Reduction 10 on `(a, b, c, d)`: removes c.
pub fn apply_r10(
    pair: &TreePair,
    o: Orient,
    w: &[&str],
    cfg: &KernelConfig,
) -> Result<Option<Applied>> {
    let (x, y) = pair.oriented(o);
    if !all_distinct(w) || !r10_shape(x, y, w) {
        return Ok(None);
    }
    let verdict = r10_eligible(x, y, w, &cfg.eligibility)?;
    if !verdict.is_yes() {
        return Ok(None);
    }
    let out = pair.without(&w[2..3])?;
    let ev = ReductionEvent {
        rule: Rule::R10,
        orient: o,
        witness: to_taxa(w),
        delta_k: 1,
        taxa_removed: 1,
        pattern: verdict.matched_pattern,
        description: format!("taxon {} removed as a singleton", w[2]),
    };
    Ok(Some((out, ev)))
}

pub fn reduce10(pair: &TreePair, cfg: &KernelConfig) -> Result<Option<Applied>> {
    for o in Orient::BOTH {
        let (x, y) = pair.oriented(o);
        for t in r10_tuples(x, y) {
            if let Some(r) = apply_r10(pair, o, &strs(&t), cfg)? {
                return Ok(Some(r));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;

    fn tree(s: &str) -> PhyloTree {
        parse_newick(s).unwrap()
    }

    #[test]
    fn interrupted_chain_found() {
        let t = tree("((x,y),a,(b,(c,(d,(s,(p,q))))));");
        let tp = tree("((x,p),a,(b,((s,y),(c,(d,q)))));");
        let found = find_interrupted_4chains(&t, &tp).unwrap();
        let abcd: Vec<&InterruptedChain> = found
            .iter()
            .filter(|ic| strs(&ic.chain) == ["a", "b", "c", "d"])
            .collect();
        assert_eq!(abcd.len(), 1);
        let (u, v) = abcd[0].interrupter.endpoints();
        let side = tp.side_taxa(v, u);
        let side2 = tp.side_taxa(u, v);
        assert!(side == crate::tree::taxa(["s", "y"]) || side2 == crate::tree::taxa(["s", "y"]));
        assert!(find_interrupted_4chains(&t, &t).unwrap().is_empty());
    }

    #[test]
    fn operation_p_rewires_only_tprime() {
        let x = tree("((x1,x2),a,(b,(c,(d,(y1,y2)))));");
        let y = tree("((a,b),x1,(x2,((c,d),(y1,y2))));");
        let out = rewire_p(&y, &["a", "b", "c", "d"]).unwrap();
        assert!(out.is_cherry("b", "c"));
        assert!(is_common_chain(&x, &out, &["b", "c", "d"]));
    }
}
