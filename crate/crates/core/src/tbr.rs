//! TBR moves and random trees.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tree::{EdgeRef, Editor, PhyloTree, Taxon};

/// Applies one TBR move.
///
/// The edge `cut` is deleted. `attach1` names an edge of the component that
/// contains the smaller endpoint of `cut`, `attach2` an edge of the other
/// component; `None` is required exactly when that component is a single
/// leaf. Attachment edges are given in the original tree's vertex ids. The
/// two edges incident to a suppressed cut endpoint both denote the edge that
/// replaces them.
pub fn tbr_move(
    tree: &PhyloTree,
    cut: EdgeRef,
    attach1: Option<EdgeRef>,
    attach2: Option<EdgeRef>,
) -> Result<PhyloTree> {
    let (x, y) = cut.endpoints();
    if !tree.has_edge(x, y) {
        return Err(Error::NotAnEdge(cut.to_string()));
    }
    let mut ed = Editor::new(tree);
    ed.disconnect(x, y)?;
    let px = attach_point(&mut ed, x, attach1)?;
    let py = attach_point(&mut ed, y, attach2)?;
    ed.connect(px, py);
    ed.finish()
}

/// Prepares one side of a TBR move and returns the vertex to reconnect.
fn attach_point(ed: &mut Editor, end: usize, attach: Option<EdgeRef>) -> Result<usize> {
    let side = ed.component(end);
    match (ed.adj[end].len(), attach) {
        (0, None) => Ok(end),
        (0, Some(e)) => Err(Error::NotAnEdge(format!("{e} (component is a single leaf)"))),
        (_, None) => Err(Error::Precondition(
            "component has more than one vertex; an attachment edge is required".into(),
        )),
        (_, Some(e)) => {
            let (a, b) = e.endpoints();
            if !side.contains(&a) || !side.contains(&b) || !ed.adj[a].contains(&b) {
                return Err(Error::NotAnEdge(format!("{e} in the stated component")));
            }
            let (n1, n2) = (ed.adj[end][0], ed.adj[end][1]);
            ed.suppress(end);
            let (a, b) = if a == end || b == end { (n1, n2) } else { (a, b) };
            ed.subdivide(a, b)
        }
    }
}

/// Every tree one TBR move away (including the tree itself), deduplicated
/// by canonical Newick.
pub fn tbr_neighbors(tree: &PhyloTree) -> Vec<PhyloTree> {
    let mut out: BTreeMap<String, PhyloTree> = BTreeMap::new();
    for cut in tree.edges() {
        let (x, y) = cut.endpoints();
        let options = |end: usize, other: usize| -> Vec<Option<EdgeRef>> {
            if tree.is_leaf(end) {
                return vec![None];
            }
            let side = tree.side_vertices(other, end);
            let mut es = Vec::new();
            for &v in &side {
                for &w in tree.neighbors(v) {
                    if v < w && w != other && side.contains(&w) {
                        es.push(Some(EdgeRef::new(v, w)));
                    }
                }
            }
            es
        };
        let (o1, o2) = (options(x, y), options(y, x));
        for a1 in &o1 {
            for a2 in &o2 {
                let moved = tbr_move(tree, cut, *a1, *a2).expect("enumerated move is valid");
                out.entry(moved.to_newick()).or_insert(moved);
            }
        }
    }
    out.into_values().collect()
}

/// Random binary tree on `labels` by stepwise addition onto uniformly chosen
/// edges.
pub fn random_tree<R: Rng + ?Sized>(labels: &[Taxon], rng: &mut R) -> Result<PhyloTree> {
    if labels.len() < 3 {
        return Err(Error::Precondition("random trees need at least 3 taxa".into()));
    }
    let mut order = labels.to_vec();
    order.shuffle(rng);
    let mut ed = Editor::empty();
    let centre = ed.add_vertex(None);
    let mut edges = Vec::new();
    for t in &order[..3] {
        let leaf = ed.add_vertex(Some(t.clone()));
        ed.connect(centre, leaf);
        edges.push((centre, leaf));
    }
    for t in &order[3..] {
        let i = rng.gen_range(0..edges.len());
        let (a, b) = edges.swap_remove(i);
        let mid = ed.subdivide(a, b)?;
        let leaf = ed.add_vertex(Some(t.clone()));
        ed.connect(mid, leaf);
        edges.extend([(a, mid), (mid, b), (mid, leaf)]);
    }
    ed.finish()
}

/// Every unrooted binary tree on `labels`, by stepwise addition onto each
/// edge in turn. There are (2n − 5)!! of them.
pub fn all_trees(labels: &[Taxon]) -> Result<Vec<PhyloTree>> {
    if labels.len() < 3 {
        return Err(Error::Precondition("tree enumeration needs at least 3 taxa".into()));
    }
    fn grow(ed: &Editor, edges: &[(usize, usize)], rest: &[Taxon], out: &mut Vec<PhyloTree>) -> Result<()> {
        let Some((t, rest)) = rest.split_first() else {
            out.push(ed.clone().finish()?);
            return Ok(());
        };
        for i in 0..edges.len() {
            let mut ed = ed.clone();
            let mut edges = edges.to_vec();
            let (a, b) = edges.swap_remove(i);
            let mid = ed.subdivide(a, b)?;
            let leaf = ed.add_vertex(Some(t.clone()));
            ed.connect(mid, leaf);
            edges.extend([(a, mid), (mid, b), (mid, leaf)]);
            grow(&ed, &edges, rest, out)?;
        }
        Ok(())
    }
    let mut ed = Editor::empty();
    let centre = ed.add_vertex(None);
    let mut edges = Vec::new();
    for t in &labels[..3] {
        let leaf = ed.add_vertex(Some(t.clone()));
        ed.connect(centre, leaf);
        edges.push((centre, leaf));
    }
    let mut out = Vec::new();
    grow(&ed, &edges, &labels[3..], &mut out)?;
    Ok(out)
}

/// One uniformly chosen TBR move (cut edge, then attachment edges).
pub fn random_tbr<R: Rng + ?Sized>(tree: &PhyloTree, rng: &mut R) -> Result<PhyloTree> {
    let edges = tree.edges();
    let cut = edges[rng.gen_range(0..edges.len())];
    let (x, y) = cut.endpoints();
    let mut pick = |end: usize, other: usize| -> Option<EdgeRef> {
        if tree.is_leaf(end) {
            return None;
        }
        let side = tree.side_vertices(other, end);
        let es: Vec<EdgeRef> = edges
            .iter()
            .copied()
            .filter(|e| {
                let (a, b) = e.endpoints();
                *e != cut && side.contains(&a) && side.contains(&b)
            })
            .collect();
        Some(es[rng.gen_range(0..es.len())])
    };
    let a1 = pick(x, y);
    let a2 = pick(y, x);
    tbr_move(tree, cut, a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reattaching_in_place_is_identity() {
        let t = parse_newick("(a,b,(c,(d,e)));").unwrap();
        let b = t.leaf("b").unwrap();
        let pb = t.parent("b");
        let other = *t.neighbors(pb).iter().find(|&&w| w != b).unwrap();
        let moved = if b < pb {
            tbr_move(&t, EdgeRef::new(b, pb), None, Some(EdgeRef::new(pb, other))).unwrap()
        } else {
            tbr_move(&t, EdgeRef::new(b, pb), Some(EdgeRef::new(pb, other)), None).unwrap()
        };
        assert!(moved == t);
    }

    #[test]
    fn quartet_neighbourhood() {
        let t = parse_newick("(a,b,(c,d));").unwrap();
        let ns: Vec<String> = tbr_neighbors(&t).iter().map(|n| n.to_newick()).collect();
        assert_eq!(ns.len(), 3);
        assert!(ns.contains(&"(a,(b,d),c);".to_string()));
        assert!(ns.contains(&"(a,(b,c),d);".to_string()));
    }

    #[test]
    fn internal_cut_subdivides_both_sides() {
        let t = parse_newick("((a,b),(c,d),(e,f));").unwrap();
        let pa = t.parent("a");
        let root = *t.neighbors(pa).iter().find(|&&w| !t.is_leaf(w)).unwrap();
        let cut = EdgeRef::new(pa, root);
        let side_a = |v: usize| t.side_vertices(root, pa).contains(&v);
        let ea = EdgeRef::new(t.leaf("a").unwrap(), pa);
        let ec = EdgeRef::new(t.leaf("c").unwrap(), t.parent("c"));
        let (a1, a2) = if side_a(cut.endpoints().0) { (ea, ec) } else { (ec, ea) };
        let moved = tbr_move(&t, cut, Some(a1), Some(a2)).unwrap();
        assert_eq!(moved.num_taxa(), 6);
        assert_eq!(moved.to_newick(), "(a,b,(c,(d,(e,f))));");
        assert!(tbr_move(&t, cut, Some(a2), Some(a1)).is_err());
    }

    #[test]
    fn tree_counts() {
        let labels: Vec<Taxon> = ["a", "b", "c", "d", "e", "f"].map(Taxon::new).to_vec();
        for (n, count) in [(3, 1), (4, 3), (5, 15), (6, 105)] {
            let trees = all_trees(&labels[..n]).unwrap();
            let distinct: std::collections::BTreeSet<String> = trees.iter().map(PhyloTree::to_newick).collect();
            assert_eq!((trees.len(), distinct.len()), (count, count));
        }
    }

    #[test]
    fn random_moves_keep_taxa() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let labels: Vec<Taxon> = (0..9).map(|i| Taxon::new(&format!("t{i}"))).collect();
        let mut t = random_tree(&labels, &mut rng).unwrap();
        for _ in 0..20 {
            t = random_tbr(&t, &mut rng).unwrap();
            assert_eq!(t.num_taxa(), 9);
            assert!(t.validate().is_ok());
        }
    }
}
