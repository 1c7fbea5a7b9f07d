//! Reductions 1 to 7 and chain extension.

use std::collections::BTreeSet;

use crate::chain::{
    common_chains, common_pendant_subtrees, find_maximal_common_chains,
    find_maximal_common_pendant_subtrees, is_chain, is_common_chain,
};
use crate::error::{Error, Result};
use crate::pair::{Orient, TreePair};
use crate::reduce::{all_distinct, to_taxa, Applied, ReductionEvent, Rule};
use crate::tree::{Editor, PhyloTree, Taxon};

fn event(
    rule: Rule,
    orient: Orient,
    witness: &[&str],
    removed: i64,
    description: String,
) -> ReductionEvent {
    ReductionEvent {
        rule,
        orient,
        witness: to_taxa(witness),
        delta_k: rule.delta_k(),
        taxa_removed: removed,
        pattern: None,
        description,
    }
}

fn strs(v: &[Taxon]) -> Vec<&str> {
    v.iter().map(Taxon::as_str).collect()
}

/// Replaces the common pendant subtree on `ys` by one fresh leaf in both
/// trees. Returns `None` if `ys` is not a common pendant subtree.
pub(crate) fn replace_subtree(pair: &TreePair, ys: &[&str]) -> Result<Option<(TreePair, Taxon)>> {
    let mut sorted: Vec<Taxon> = to_taxa(ys);
    sorted.sort();
    if !common_pendant_subtrees(&pair.t, &pair.tp)?.contains(&sorted) {
        return Ok(None);
    }
    let mut out = pair.clone();
    let z = out.fresh();
    let keep = sorted[0].as_str();
    let rest: Vec<&str> = sorted[1..].iter().map(Taxon::as_str).collect();
    out.t = pair.t.relabel(keep, z.clone())?.remove_taxa(&rest)?;
    out.tp = pair.tp.relabel(keep, z.clone())?.remove_taxa(&rest)?;
    Ok(Some((out, z)))
}

/// Reduction 1 on an explicit maximal common pendant subtree.
pub fn apply_r1(pair: &TreePair, ys: &[&str]) -> Result<Option<Applied>> {
    let set: BTreeSet<Taxon> = to_taxa(ys).into_iter().collect();
    if !find_maximal_common_pendant_subtrees(&pair.t, &pair.tp)?.contains(&set) {
        return Ok(None);
    }
    let Some((out, z)) = replace_subtree(pair, ys)? else {
        return Ok(None);
    };
    let ev = event(
        Rule::R1,
        Orient::Forward,
        ys,
        ys.len() as i64 - 1,
        format!("common pendant subtree of {} taxa replaced by {z}", ys.len()),
    );
    Ok(Some((out, ev)))
}

/// Reduction 1: replace the first maximal common pendant subtree.
pub fn reduce1_subtree(pair: &TreePair) -> Result<Option<Applied>> {
    for y in find_maximal_common_pendant_subtrees(&pair.t, &pair.tp)? {
        let w: Vec<&str> = y.iter().map(Taxon::as_str).collect();
        if let Some(r) = apply_r1(pair, &w)? {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Reduction 2 on an explicit maximal common chain, given in normalized
/// orientation.
pub fn apply_r2(pair: &TreePair, chain: &[&str]) -> Result<Option<Applied>> {
    if chain.len() < 4 {
        return Ok(None);
    }
    let found = find_maximal_common_chains(&pair.t, &pair.tp, 4)?;
    if !found.iter().any(|(c, _)| strs(&c.taxa) == chain) {
        return Ok(None);
    }
    let out = pair.without(&chain[3..])?;
    let ev = event(
        Rule::R2,
        Orient::Forward,
        chain,
        chain.len() as i64 - 3,
        format!("common {}-chain truncated to its first three taxa", chain.len()),
    );
    Ok(Some((out, ev)))
}

/// Reduction 2: truncate the first maximal common chain of length ≥ 4.
pub fn reduce2_chain(pair: &TreePair) -> Result<Option<Applied>> {
    if let Some((c, _)) = find_maximal_common_chains(&pair.t, &pair.tp, 4)?.first() {
        return apply_r2(pair, &strs(&c.taxa));
    }
    Ok(None)
}

fn check_r3(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> bool {
    w.len() == 3 && is_common_chain(x, y, w) && x.is_cherry(w[0], w[1]) && y.is_cherry(w[1], w[2])
}

/// Reduction 3 on `(l1, l2, l3)`.
pub fn apply_r3(pair: &TreePair, o: Orient, w: &[&str]) -> Result<Option<Applied>> {
    let (x, y) = pair.oriented(o);
    if !check_r3(x, y, w) {
        return Ok(None);
    }
    let out = pair.without(w)?;
    let ev = event(Rule::R3, o, w, 3, "common 3-chain pendant at opposite ends removed".into());
    Ok(Some((out, ev)))
}

pub fn reduce3(pair: &TreePair) -> Result<Option<Applied>> {
    for o in Orient::BOTH {
        let (x, y) = pair.oriented(o);
        for c in common_chains(x, y, 3) {
            let w = strs(&c);
            if check_r3(x, y, &w) {
                return apply_r3(pair, o, &w);
            }
        }
    }
    Ok(None)
}

fn check_r4(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> bool {
    w.len() == 4
        && all_distinct(w)
        && is_common_chain(x, y, &w[..3])
        && x.is_cherry(w[1], w[2])
        && y.is_cherry(w[2], w[3])
}

/// Reduction 4 on `(l1, l2, l3, x)`.
pub fn apply_r4(pair: &TreePair, o: Orient, w: &[&str]) -> Result<Option<Applied>> {
    let (x, y) = pair.oriented(o);
    if !check_r4(x, y, w) {
        return Ok(None);
    }
    let out = pair.without(&w[3..])?;
    let ev = event(Rule::R4, o, w, 1, format!("taxon {} removed", w[3]));
    Ok(Some((out, ev)))
}

pub fn reduce4(pair: &TreePair) -> Result<Option<Applied>> {
    for o in Orient::BOTH {
        let (x, y) = pair.oriented(o);
        for c in common_chains(x, y, 3) {
            if !x.is_cherry(c[1].as_str(), c[2].as_str()) {
                continue;
            }
            if let Some(xp) = y.cherry_partner(c[2].as_str()) {
                let mut w = strs(&c);
                w.push(xp.as_str());
                if check_r4(x, y, &w) {
                    return apply_r4(pair, o, &w);
                }
            }
        }
    }
    Ok(None)
}

fn check_r5(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> bool {
    w.len() == 5
        && all_distinct(w)
        && is_common_chain(x, y, &w[0..2])
        && is_common_chain(x, y, &w[2..4])
        && x.is_cherry(w[1], w[4])
        && x.is_cherry(w[2], w[3])
        && y.is_cherry(w[0], w[1])
        && y.is_cherry(w[3], w[4])
}

/// Reduction 5 on `(l1, l2, l3, l4, x)`.
pub fn apply_r5(pair: &TreePair, o: Orient, w: &[&str]) -> Result<Option<Applied>> {
    let (x, y) = pair.oriented(o);
    if !check_r5(x, y, w) {
        return Ok(None);
    }
    let out = pair.without(&w[4..])?;
    let ev = event(Rule::R5, o, w, 1, format!("taxon {} removed", w[4]));
    Ok(Some((out, ev)))
}

pub fn reduce5(pair: &TreePair) -> Result<Option<Applied>> {
    for o in Orient::BOTH {
        let (x, y) = pair.oriented(o);
        for c in common_chains(x, y, 2) {
            let (l1, l2) = (c[0].as_str(), c[1].as_str());
            if !y.is_cherry(l1, l2) {
                continue;
            }
            let Some(xp) = x.cherry_partner(l2) else { continue };
            let Some(l4) = y.cherry_partner(xp.as_str()) else { continue };
            let Some(l3) = x.cherry_partner(l4.as_str()) else { continue };
            let w = [l1, l2, l3.as_str(), l4.as_str(), xp.as_str()];
            if check_r5(x, y, &w) {
                return apply_r5(pair, o, &w);
            }
        }
    }
    Ok(None)
}

fn check_r6(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> bool {
    w.len() == 6
        && all_distinct(w)
        && is_common_chain(x, y, &w[0..3])
        && is_common_chain(x, y, &w[3..6])
        && x.is_cherry(w[1], w[2])
        && x.is_cherry(w[3], w[4])
        && is_chain(y, w)
}

/// Reduction 6 on `(l1, …, l6)`: removes l4 and l5.
pub fn apply_r6(pair: &TreePair, o: Orient, w: &[&str]) -> Result<Option<Applied>> {
    let (x, y) = pair.oriented(o);
    if !check_r6(x, y, w) {
        return Ok(None);
    }
    let out = pair.without(&w[3..5])?;
    let ev = event(Rule::R6, o, w, 2, format!("taxa {} and {} removed", w[3], w[4]));
    Ok(Some((out, ev)))
}

/// Common 3-chains (l1, l2, l3) of (x, y) with {l2, l3} a cherry of x.
fn chains_ending_in_x_cherry(x: &PhyloTree, y: &PhyloTree) -> Vec<Vec<Taxon>> {
    common_chains(x, y, 3)
        .into_iter()
        .filter(|c| x.is_cherry(c[1].as_str(), c[2].as_str()))
        .collect()
}

pub fn reduce6(pair: &TreePair) -> Result<Option<Applied>> {
    for o in Orient::BOTH {
        let (x, y) = pair.oriented(o);
        let firsts = chains_ending_in_x_cherry(x, y);
        let seconds: Vec<Vec<Taxon>> = common_chains(x, y, 3)
            .into_iter()
            .filter(|c| x.is_cherry(c[0].as_str(), c[1].as_str()))
            .collect();
        for c1 in &firsts {
            for c2 in &seconds {
                let w: Vec<&str> = strs(c1).into_iter().chain(strs(c2)).collect();
                if check_r6(x, y, &w) {
                    return apply_r6(pair, o, &w);
                }
            }
        }
    }
    Ok(None)
}

fn check_r7(x: &PhyloTree, y: &PhyloTree, w: &[&str]) -> bool {
    w.len() == 5
        && all_distinct(w)
        && is_common_chain(x, y, &w[0..3])
        && is_common_chain(x, y, &w[3..5])
        && x.is_cherry(w[1], w[2])
        && x.is_cherry(w[3], w[4])
        && is_chain(y, w)
}

/// Reduction 7 on `(l1, …, l5)`: removes l4.
pub fn apply_r7(pair: &TreePair, o: Orient, w: &[&str]) -> Result<Option<Applied>> {
    let (x, y) = pair.oriented(o);
    if !check_r7(x, y, w) {
        return Ok(None);
    }
    let out = pair.without(&w[3..4])?;
    let ev = event(Rule::R7, o, w, 1, format!("taxon {} removed", w[3]));
    Ok(Some((out, ev)))
}

pub fn reduce7(pair: &TreePair) -> Result<Option<Applied>> {
    for o in Orient::BOTH {
        let (x, y) = pair.oriented(o);
        let firsts = chains_ending_in_x_cherry(x, y);
        let seconds: Vec<Vec<Taxon>> = common_chains(x, y, 2)
            .into_iter()
            .filter(|c| x.is_cherry(c[0].as_str(), c[1].as_str()))
            .collect();
        for c1 in &firsts {
            for c2 in &seconds {
                let w: Vec<&str> = strs(c1).into_iter().chain(strs(c2)).collect();
                if check_r7(x, y, &w) {
                    return apply_r7(pair, o, &w);
                }
            }
        }
    }
    Ok(None)
}

/// Which end of a chain to extend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

/// Splices `labels` onto one end of `chain` in a single tree. At a pendant
/// end the new leaf joins the end taxon in a cherry; otherwise it is hung
/// from the edge leaving the end taxon's parent away from the chain.
pub fn extend_chain_in_tree(
    tree: &PhyloTree,
    chain: &[&str],
    labels: &[Taxon],
    end: End,
) -> Result<PhyloTree> {
    if !is_chain(tree, chain) || chain.len() < 2 {
        return Err(Error::Precondition("not a chain of the tree".into()));
    }
    let mut seq: Vec<String> = chain.iter().map(|s| s.to_string()).collect();
    if end == End::Left {
        seq.reverse();
    }
    let mut current = tree.clone();
    for label in labels {
        if current.contains(label.as_str()) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        let n = seq.len();
        let (last, prev) = (seq[n - 1].as_str(), seq[n - 2].as_str());
        let leaf = current.leaf_of(last);
        let p_last = current.parent(last);
        let p_prev = current.parent(prev);
        let mut ed = Editor::new(&current);
        let q = if p_last == p_prev {
            ed.subdivide(leaf, p_last)?
        } else {
            let w = *current
                .neighbors(p_last)
                .iter()
                .find(|&&w| w != leaf && w != p_prev)
                .ok_or_else(|| Error::Invariant("chain end has no outward edge".into()))?;
            ed.subdivide(p_last, w)?
        };
        let g = ed.add_vertex(Some(label.clone()));
        ed.connect(q, g);
        current = ed.finish()?;
        seq.push(label.to_string());
    }
    Ok(current)
}

/// Extends a common chain in both trees (the inverse of Reduction 2).
pub fn extend_chain(
    t: &PhyloTree,
    tp: &PhyloTree,
    chain: &[&str],
    labels: &[Taxon],
    end: End,
) -> Result<(PhyloTree, PhyloTree)> {
    if !is_common_chain(t, tp, chain) {
        return Err(Error::Precondition("chain is not common".into()));
    }
    Ok((
        extend_chain_in_tree(t, chain, labels, end)?,
        extend_chain_in_tree(tp, chain, labels, end)?,
    ))
}
