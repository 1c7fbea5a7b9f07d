//! The tight instance family: trees with 9k − 9 taxa at TBR distance k on
//! which no reduction applies.
//!
//! Both trees are displayed by the ladder generator decorated with three
//! taxa per side. Breakpoint placements and the split character come from a
//! deterministic search that checks every required property.

use std::collections::BTreeSet;

use crate::chain::{common_pendant_subtrees, find_maximal_common_chains, is_common_chain};
use crate::error::{Error, Result};
use crate::kernel::kernelize;
use crate::maf::{is_agreement_forest, AgreementForest};
use crate::network::{Breakpoint, Generator, Network};
use crate::parsimony::{fitch_score, BinaryCharacter};
use crate::tree::{Editor, PhyloTree, Taxon};

/// Taxa per side.
pub const TAXA_PER_SIDE: usize = 3;

#[derive(Clone, Debug)]
pub struct TightInstance {
    pub k: usize,
    pub t: PhyloTree,
    pub tp: PhyloTree,
    pub character: BinaryCharacter,
    /// Agreement forest with k + 1 blocks.
    pub forest: AgreementForest,
    pub lf_t: usize,
    pub lf_tprime: usize,
    pub network: Network,
    pub breakpoints_t: Vec<Breakpoint>,
    pub breakpoints_tprime: Vec<Breakpoint>,
}

/// Pendant 3-chains (p, q, r) with cherry {q, r}, one per structure, as
/// (p, q, r) with q < r.
pub fn pendant_three_chains(tree: &PhyloTree) -> Vec<[Taxon; 3]> {
    let mut out = Vec::new();
    for (q, r) in tree.cherries() {
        let pq = tree.parent(q.as_str());
        for &w in tree.neighbors(pq) {
            if tree.is_leaf(w) {
                continue;
            }
            for p in tree.leaf_children(w) {
                out.push([p.clone(), q.clone(), r.clone()]);
            }
        }
    }
    out.sort();
    out
}

/// The ladder network for `k` with taxa `x00`, `x01`, … in side order.
pub fn ladder_network(k: usize) -> Result<Network> {
    let g = Generator::ladder(k)?;
    let width = if 9 * k >= 100 { 3 } else { 2 };
    let decoration = (0..g.sides.len())
        .map(|s| {
            (0..TAXA_PER_SIDE)
                .map(|i| Taxon::new(&format!("x{:0width$}", s * TAXA_PER_SIDE + i)))
                .collect()
        })
        .collect();
    Network::new(g, decoration)
}

/// Components of the network after deleting both breakpoint sets.
pub fn breakpoint_forest(
    net: &Network,
    a: &[Breakpoint],
    b: &[Breakpoint],
) -> AgreementForest {
    let g = &net.generator;
    let mut ed = Editor::empty();
    for _ in 0..g.num_vertices {
        ed.add_vertex(None);
    }
    let mut leaves = Vec::new();
    for (s, &(u, w)) in g.sides.iter().enumerate() {
        let mut path = vec![u];
        for t in &net.decoration[s] {
            let v = ed.add_vertex(None);
            let leaf = ed.add_vertex(Some(t.clone()));
            leaves.push((leaf, t.clone()));
            ed.connect(v, leaf);
            path.push(v);
        }
        path.push(w);
        for i in 0..path.len() - 1 {
            let cut = a.iter().chain(b).any(|x| x.side == s && x.position == i);
            if !cut {
                ed.connect(path[i], path[i + 1]);
            }
        }
    }
    let mut blocks: Vec<BTreeSet<Taxon>> = Vec::new();
    let mut done = BTreeSet::new();
    for (leaf, _) in &leaves {
        if done.contains(leaf) {
            continue;
        }
        let comp = ed.component(*leaf);
        let block: BTreeSet<Taxon> = leaves
            .iter()
            .filter(|(l, _)| comp.contains(l))
            .map(|(l, t)| {
                done.insert(*l);
                t.clone()
            })
            .collect();
        blocks.push(block);
    }
    AgreementForest::new(blocks)
}

/// Every property the tight family must satisfy, except the character and
/// forest certificates. Returns the first violation.
pub fn structural_violation(t: &PhyloTree, tp: &PhyloTree, k: usize) -> Result<Option<String>> {
    for (name, tree) in [("T", t), ("T'", tp)] {
        let cherries = tree.cherries().len();
        if cherries != k + 1 {
            return Ok(Some(format!("{name} has {cherries} cherries")));
        }
        let pc = pendant_three_chains(tree);
        if pc.len() != 1 {
            return Ok(Some(format!("{name} has {} pendant 3-chains", pc.len())));
        }
        let [p, q, r] = &pc[0];
        if is_common_chain(t, tp, &[p, q, r]) || is_common_chain(t, tp, &[p, r, q]) {
            return Ok(Some(format!("pendant 3-chain of {name} is common")));
        }
    }
    if let Some(y) = common_pendant_subtrees(t, tp)?.first() {
        return Ok(Some(format!("common pendant subtree {y:?}")));
    }
    if let Some((c, _)) = find_maximal_common_chains(t, tp, 4)?.first() {
        return Ok(Some(format!("common chain of length {}", c.len())));
    }
    Ok(None)
}

/// Fitch scores of `f` on both trees.
fn scores(t: &PhyloTree, tp: &PhyloTree, f: &BinaryCharacter) -> Result<(usize, usize)> {
    Ok((fitch_score(t, f)?, fitch_score(tp, f)?))
}

/// Characters separating the top rail from the bottom rail: every rung-like
/// side is split at one position, the top part gets 0.
fn rail_characters(net: &Network, k: usize, fixed: &[Breakpoint]) -> Vec<BinaryCharacter> {
    let g = &net.generator;
    let m = k - 1;
    let top_rail: Vec<usize> = (0..m - 1).collect();
    let rungs: Vec<usize> = (2 * (m - 1)..g.sides.len()).collect();
    // A rung is oriented top to bottom, so positions count from the top.
    let free: Vec<usize> = rungs
        .iter()
        .copied()
        .filter(|s| !fixed.iter().any(|b| b.side == *s))
        .collect();
    let mut out = Vec::new();
    let total = (TAXA_PER_SIDE + 1).pow(free.len() as u32);
    for code in 0..total {
        let mut zeros = BTreeSet::new();
        for &s in &top_rail {
            zeros.extend(net.decoration[s].iter().cloned());
        }
        let mut c = code;
        for &s in &rungs {
            let pos = match fixed.iter().find(|b| b.side == s) {
                Some(b) => b.position,
                None => {
                    let p = c % (TAXA_PER_SIDE + 1);
                    c /= TAXA_PER_SIDE + 1;
                    p
                }
            };
            zeros.extend(net.decoration[s][..pos].iter().cloned());
        }
        out.push(BinaryCharacter::indicator(net.taxa(), &zeros));
    }
    out
}

/// Search order for breakpoint positions on T and T' sides.
const T_POSITIONS: [usize; 4] = [2, 1, 0, 3];
const TP_POSITIONS: [usize; 3] = [1, 2, 0];
/// Radix of each placement parameter, see [`placements`].
const RADIX: [usize; 11] = [4, 4, 4, 4, 3, 3, 2, 3, 2, 3, 2];

/// Breakpoint placements for T and T'. T keeps rung `keep` and cuts every
/// other rung-like side. T' cuts one rail side per square, alternating
/// between the rails, plus one side of each end digon.
///
/// `p` holds: T position on even rungs, odd rungs, left arc, right arc;
/// T' position on even squares, odd squares; left end side (rung or arc)
/// and position; right end side and position; the rail of square 0.
fn placements(k: usize, p: &[usize; 11], keep: usize) -> (Vec<Breakpoint>, Vec<Breakpoint>) {
    let m = k - 1;
    let nt = m - 1;
    let rung = |i: usize| 2 * nt + i;
    let arc_left = 2 * nt + m;
    let arc_right = arc_left + 1;
    let bp = |side, position| Breakpoint { side, position };
    let mut bt: Vec<Breakpoint> = (0..m)
        .filter(|&i| i != keep)
        .map(|i| bp(rung(i), T_POSITIONS[p[i % 2]]))
        .collect();
    bt.push(bp(arc_left, T_POSITIONS[p[2]]));
    bt.push(bp(arc_right, T_POSITIONS[p[3]]));
    let mut btp: Vec<Breakpoint> = (0..nt)
        .map(|s| {
            let side = if (s + p[10]) % 2 == 0 { s } else { nt + s };
            bp(side, TP_POSITIONS[p[4 + s % 2]])
        })
        .collect();
    btp.push(bp(if p[6] == 0 { rung(0) } else { arc_left }, TP_POSITIONS[p[7]]));
    btp.push(bp(if p[8] == 0 { rung(m - 1) } else { arc_right }, TP_POSITIONS[p[9]]));
    (bt, btp)
}

/// Builds the tight pair for `k ≥ 3`, with its certificates.
pub fn tight_instance(k: usize) -> Result<TightInstance> {
    if k < 3 {
        return Err(Error::Precondition("tight instances need k ≥ 3".into()));
    }
    let net = ladder_network(k)?;
    let total: usize = RADIX.iter().product();
    for (keep, code) in (0..k - 1).flat_map(|keep| (0..total).map(move |c| (keep, c))) {
        let mut c = code;
        let mut p = [0; 11];
        for (slot, r) in p.iter_mut().zip(RADIX) {
            *slot = c % r;
            c /= r;
        }
        let (bt, btp) = placements(k, &p, keep);
        let (Ok(t), Ok(tp)) = (net.display_tree(&bt), net.display_tree(&btp)) else {
            continue;
        };
        if structural_violation(&t, &tp, k)?.is_some() {
            continue;
        }
        let forest = breakpoint_forest(&net, &bt, &btp);
        if forest.len() != k + 1 || !is_agreement_forest(&t, &tp, &forest.blocks)? {
            continue;
        }
        let Some((character, lf_t, lf_tprime)) = find_character(&net, k, &bt, &t, &tp)? else {
            continue;
        };
        if !kernelize(&t, &tp)?.trace.is_empty() {
            continue;
        }
        return Ok(TightInstance {
            k,
            t,
            tp,
            character,
            forest,
            lf_t,
            lf_tprime,
            network: net,
            breakpoints_t: bt,
            breakpoints_tprime: btp,
        });
    }
    Err(Error::Invariant(format!("no tight placement found for k = {k}")))
}

fn find_character(
    net: &Network,
    k: usize,
    bt: &[Breakpoint],
    t: &PhyloTree,
    tp: &PhyloTree,
) -> Result<Option<(BinaryCharacter, usize, usize)>> {
    for f in rail_characters(net, k, bt) {
        let (a, b) = scores(t, tp, &f)?;
        if a == 1 && b >= k + 1 {
            return Ok(Some((f, a, b)));
        }
    }
    Ok(None)
}
