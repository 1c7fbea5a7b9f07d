//! Unrooted binary phylogenetic trees.
//!
//! A [`PhyloTree`] is an immutable value. Every structural edit goes through
//! the crate-private [`Editor`], which re-validates the degree law when the
//! edit is finished.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Prefix reserved for labels minted by the reduction engine.
pub const FRESH_PREFIX: &str = "_z";

/// A leaf label. Taxa compare by their label text.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Taxon(Arc<str>);

impl Taxon {
    pub fn new(label: &str) -> Self {
        Taxon(Arc::from(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True for labels minted by the engine (`_z<counter>`).
    pub fn is_fresh(&self) -> bool {
        self.0.starts_with(FRESH_PREFIX)
    }
}

impl Borrow<str> for Taxon {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Taxon {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Taxon {
    fn from(s: &str) -> Self {
        Taxon::new(s)
    }
}

impl fmt::Display for Taxon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Taxon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for Taxon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Taxon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Taxon::new(&s))
    }
}

/// Builds a sorted taxon set from anything string-like.
pub fn taxa<I, S>(labels: I) -> BTreeSet<Taxon>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    labels.into_iter().map(|s| Taxon::new(s.as_ref())).collect()
}

/// An undirected edge, stored with the smaller vertex id first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeRef {
    u: usize,
    v: usize,
}

impl EdgeRef {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            EdgeRef { u: a, v: b }
        } else {
            EdgeRef { u: b, v: a }
        }
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

/// Unrooted binary leaf-labelled tree.
///
/// Invariants (checked on every construction): connected and acyclic, every
/// vertex has degree 1 or 3, and the degree-1 vertices are exactly the
/// labelled leaves. Trees with one or two taxa are allowed as intermediate
/// restriction results; a one-taxon tree is a single isolated labelled vertex.
#[derive(Clone, Debug)]
pub struct PhyloTree {
    adj: Vec<Vec<usize>>,
    labels: Vec<Option<Taxon>>,
    leaves: BTreeMap<Taxon, usize>,
}

impl PhyloTree {
    /// Builds a tree from an explicit vertex list. `labels[v]` is the taxon at
    /// leaf `v`, `None` for internal vertices.
    pub fn from_edges(labels: Vec<Option<Taxon>>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); labels.len()];
        for &(a, b) in edges {
            if a >= labels.len() || b >= labels.len() || a == b {
                return Err(Error::InvalidTree(format!("bad edge ({a},{b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        Self::from_adjacency(adj, labels)
    }

    pub(crate) fn from_adjacency(adj: Vec<Vec<usize>>, labels: Vec<Option<Taxon>>) -> Result<Self> {
        let mut leaves = BTreeMap::new();
        for (v, l) in labels.iter().enumerate() {
            if let Some(t) = l {
                if leaves.insert(t.clone(), v).is_some() {
                    return Err(Error::DuplicateLabel(t.to_string()));
                }
            }
        }
        let tree = PhyloTree { adj, labels, leaves };
        tree.validate()?;
        Ok(tree)
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let n = self.adj.len();
        if self.leaves.is_empty() {
            return Err(Error::EmptyTaxa);
        }
        if n == 1 {
            return if self.labels[0].is_some() {
                Ok(())
            } else {
                Err(Error::InvalidTree("single unlabelled vertex".into()))
            };
        }
        let mut edge_count = 0usize;
        for v in 0..n {
            let d = self.adj[v].len();
            edge_count += d;
            match (d, self.labels[v].is_some()) {
                (1, true) | (3, false) => {}
                (1, false) => {
                    return Err(Error::InvalidTree(format!("unlabelled leaf vertex {v}")))
                }
                (_, true) => {
                    return Err(Error::InvalidTree(format!(
                        "labelled vertex {v} has degree {d}"
                    )))
                }
                (d, false) => return Err(Error::NonBinary { degree: d }),
            }
            let mut sorted = self.adj[v].clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != d || sorted.contains(&v) {
                return Err(Error::InvalidTree(format!("parallel edge or loop at {v}")));
            }
            for &w in &self.adj[v] {
                if !self.adj[w].contains(&v) {
                    return Err(Error::InvalidTree("asymmetric adjacency".into()));
                }
            }
        }
        if edge_count / 2 != n - 1 {
            return Err(Error::InvalidTree("edge count is not |V|-1".into()));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != n {
            return Err(Error::InvalidTree("tree is disconnected".into()));
        }
        Ok(())
    }

    pub fn num_taxa(&self) -> usize {
        self.leaves.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.len() - 1
    }

    /// Taxa in label order.
    pub fn taxa(&self) -> impl Iterator<Item = &Taxon> + '_ {
        self.leaves.keys()
    }

    pub fn taxon_set(&self) -> BTreeSet<Taxon> {
        self.leaves.keys().cloned().collect()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.leaves.contains_key(label)
    }

    /// Leaf vertex carrying `label`.
    pub fn leaf(&self, label: &str) -> Option<usize> {
        self.leaves.get(label).copied()
    }

    pub(crate) fn leaf_of(&self, label: &str) -> usize {
        match self.leaves.get(label) {
            Some(&v) => v,
            None => panic!("taxon {label} is not in the tree"),
        }
    }

    pub fn label(&self, v: usize) -> Option<&Taxon> {
        self.labels[v].as_ref()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.labels[v].is_some()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].contains(&b)
    }

    /// The unique neighbour of a taxon's leaf. Panics for one-taxon trees.
    pub fn parent(&self, label: &str) -> usize {
        self.adj[self.leaf_of(label)][0]
    }

    /// All edges in vertex order.
    pub fn edges(&self) -> Vec<EdgeRef> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (v, ns) in self.adj.iter().enumerate() {
            for &w in ns {
                if v < w {
                    out.push(EdgeRef::new(v, w));
                }
            }
        }
        out
    }

    /// Taxa whose leaves hang directly off vertex `v`.
    pub fn leaf_children(&self, v: usize) -> Vec<&Taxon> {
        let mut out: Vec<&Taxon> = self.adj[v].iter().filter_map(|&w| self.label(w)).collect();
        out.sort();
        out
    }

    pub fn is_cherry(&self, a: &str, b: &str) -> bool {
        a != b && self.num_taxa() >= 3 && self.parent(a) == self.parent(b)
    }

    /// The other member of `a`'s cherry, if `a` is in one.
    pub fn cherry_partner(&self, a: &str) -> Option<&Taxon> {
        if self.num_taxa() < 3 {
            return None;
        }
        let leaf = self.leaf_of(a);
        let p = self.adj[leaf][0];
        self.adj[p]
            .iter()
            .filter(|&&w| w != leaf)
            .find_map(|&w| self.label(w))
    }

    /// All cherries as label-sorted pairs, in label order.
    pub fn cherries(&self) -> Vec<(Taxon, Taxon)> {
        let mut out = Vec::new();
        if self.num_taxa() < 3 {
            return out;
        }
        for (t, &leaf) in &self.leaves {
            let p = self.adj[leaf][0];
            for &w in &self.adj[p] {
                if let Some(s) = self.label(w) {
                    if t < s {
                        out.push((t.clone(), s.clone()));
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Vertex path from `from` to `to`, both included.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; self.adj.len()];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &w in &self.adj[v] {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let mut out = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            out.push(cur);
        }
        out.reverse();
        out
    }

    /// Number of edges between two vertices.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.path(a, b).len() - 1
    }

    /// Vertices on the `to` side of the edge `{from, to}`.
    pub fn side_vertices(&self, from: usize, to: usize) -> Vec<usize> {
        let mut out = vec![to];
        let mut stack = vec![(to, from)];
        while let Some((v, p)) = stack.pop() {
            for &w in &self.adj[v] {
                if w != p {
                    out.push(w);
                    stack.push((w, v));
                }
            }
        }
        out
    }

    /// Taxa on the `to` side of the edge `{from, to}`.
    pub fn side_taxa(&self, from: usize, to: usize) -> BTreeSet<Taxon> {
        self.side_vertices(from, to)
            .into_iter()
            .filter_map(|v| self.labels[v].clone())
            .collect()
    }

    fn check_subset<S: AsRef<str>>(&self, ys: &[S]) -> Result<()> {
        if ys.is_empty() {
            return Err(Error::EmptyTaxa);
        }
        for y in ys {
            if !self.contains(y.as_ref()) {
                return Err(Error::UnknownTaxon(y.as_ref().to_string()));
            }
        }
        Ok(())
    }

    /// Vertices of the minimal subtree connecting the taxa `ys`.
    pub fn embedding_vertices<I, S>(&self, ys: I) -> Result<BTreeSet<usize>>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let ys: Vec<S> = ys.into_iter().collect();
        self.check_subset(&ys)?;
        let keep: Vec<bool> = {
            let mut k = vec![false; self.adj.len()];
            for y in &ys {
                k[self.leaf_of(y.as_ref())] = true;
            }
            k
        };
        // Peel leaves that are not in Y until only the connector remains.
        let mut deg: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut removed = vec![false; self.adj.len()];
        let mut stack: Vec<usize> = (0..self.adj.len())
            .filter(|&v| deg[v] == 1 && !keep[v])
            .collect();
        while let Some(v) = stack.pop() {
            if removed[v] {
                continue;
            }
            removed[v] = true;
            for &w in &self.adj[v] {
                if !removed[w] {
                    deg[w] -= 1;
                    if deg[w] == 1 && !keep[w] {
                        stack.push(w);
                    }
                }
            }
        }
        Ok((0..self.adj.len()).filter(|&v| !removed[v]).collect())
    }

    /// Edge set of the minimal subtree `T[Y]`.
    pub fn embedding<I, S>(&self, ys: I) -> Result<BTreeSet<EdgeRef>>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let vs = self.embedding_vertices(ys)?;
        let mut out = BTreeSet::new();
        for &v in &vs {
            for &w in &self.adj[v] {
                if v < w && vs.contains(&w) {
                    out.insert(EdgeRef::new(v, w));
                }
            }
        }
        Ok(out)
    }

    /// The restriction `T|Y`.
    pub fn restrict<I, S>(&self, ys: I) -> Result<PhyloTree>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let ys: Vec<S> = ys.into_iter().collect();
        self.check_subset(&ys)?;
        let keep: BTreeSet<&str> = ys.iter().map(|s| s.as_ref()).collect();
        let mut ed = Editor::new(self);
        for (t, &v) in &self.leaves {
            if !keep.contains(t.as_str()) {
                ed.labels[v] = None;
            }
        }
        ed.prune_unlabelled_leaves();
        ed.suppress_all();
        ed.finish()
    }

    /// The restriction to all taxa except `remove`.
    pub fn remove_taxa<I, S>(&self, remove: I) -> Result<PhyloTree>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let drop: BTreeSet<String> = remove.into_iter().map(|s| s.as_ref().to_string()).collect();
        for d in &drop {
            if !self.contains(d) {
                return Err(Error::UnknownTaxon(d.clone()));
            }
        }
        self.restrict(self.taxa().filter(|t| !drop.contains(t.as_str())))
    }

    /// Renames one taxon.
    pub fn relabel(&self, old: &str, new: Taxon) -> Result<PhyloTree> {
        let v = self
            .leaf(old)
            .ok_or_else(|| Error::UnknownTaxon(old.to_string()))?;
        if self.contains(new.as_str()) && new.as_str() != old {
            return Err(Error::DuplicateLabel(new.to_string()));
        }
        let mut labels = self.labels.clone();
        labels[v] = Some(new);
        PhyloTree::from_adjacency(self.adj.clone(), labels)
    }

    /// Canonical Newick serialization (see the crate docs for the convention).
    pub fn to_newick(&self) -> String {
        match self.num_taxa() {
            1 => format!("{};", self.labels[0].as_ref().unwrap()),
            2 => {
                let mut ls: Vec<&Taxon> = self.leaves.keys().collect();
                ls.sort();
                format!("({},{});", ls[0], ls[1])
            }
            _ => {
                let root = self.parent(self.leaves.keys().next().unwrap().as_str());
                let (_, s) = self.rooted_form_inner(usize::MAX, root);
                format!("{s};")
            }
        }
    }

    /// Canonical rooted form of the part of the tree on the `v` side of the
    /// edge `{from, v}`. Pass `usize::MAX` as `from` to use every neighbour.
    pub fn rooted_form(&self, from: usize, v: usize) -> String {
        self.rooted_form_inner(from, v).1
    }

    fn rooted_form_inner(&self, from: usize, v: usize) -> (Taxon, String) {
        if let Some(t) = &self.labels[v] {
            return (t.clone(), t.to_string());
        }
        let mut parts: Vec<(Taxon, String)> = self.adj[v]
            .iter()
            .filter(|&&w| w != from)
            .map(|&w| self.rooted_form_inner(v, w))
            .collect();
        parts.sort_by(|a, b| a.0.cmp(&b.0));
        let min = parts[0].0.clone();
        let body: Vec<String> = parts.into_iter().map(|p| p.1).collect();
        (min, format!("({})", body.join(",")))
    }

    /// Leaf-label-preserving isomorphism test.
    pub fn same_topology(&self, other: &PhyloTree) -> bool {
        self.num_taxa() == other.num_taxa()
            && self.leaves.keys().eq(other.leaves.keys())
            && self.to_newick() == other.to_newick()
    }
}

impl fmt::Display for PhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_newick())
    }
}

impl PartialEq for PhyloTree {
    fn eq(&self, other: &Self) -> bool {
        self.same_topology(other)
    }
}

impl Eq for PhyloTree {}

/// True iff a leaf-label-preserving isomorphism exists.
pub fn trees_equal(t: &PhyloTree, tp: &PhyloTree) -> bool {
    t.same_topology(tp)
}

/// Mutable scratch copy of a tree. Deleted vertices stay in the arrays with
/// `alive = false` until [`Editor::finish`] compacts them.
#[derive(Clone, Debug)]
pub(crate) struct Editor {
    pub adj: Vec<Vec<usize>>,
    pub labels: Vec<Option<Taxon>>,
    pub alive: Vec<bool>,
}

impl Editor {
    pub fn new(tree: &PhyloTree) -> Self {
        Editor {
            adj: tree.adj.clone(),
            labels: tree.labels.clone(),
            alive: vec![true; tree.adj.len()],
        }
    }

    pub fn empty() -> Self {
        Editor {
            adj: Vec::new(),
            labels: Vec::new(),
            alive: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self, label: Option<Taxon>) -> usize {
        self.adj.push(Vec::new());
        self.labels.push(label);
        self.alive.push(true);
        self.adj.len() - 1
    }

    pub fn connect(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn disconnect(&mut self, a: usize, b: usize) -> Result<()> {
        let pa = self.adj[a].iter().position(|&x| x == b);
        let pb = self.adj[b].iter().position(|&x| x == a);
        match (pa, pb) {
            (Some(i), Some(j)) => {
                self.adj[a].remove(i);
                self.adj[b].remove(j);
                Ok(())
            }
            _ => Err(Error::NotAnEdge(format!("{{{a},{b}}}"))),
        }
    }

    /// Puts a new vertex in the middle of edge `{a, b}` and returns it.
    pub fn subdivide(&mut self, a: usize, b: usize) -> Result<usize> {
        self.disconnect(a, b)?;
        let w = self.add_vertex(None);
        self.connect(a, w);
        self.connect(w, b);
        Ok(w)
    }

    /// Removes a degree-2 unlabelled vertex, joining its two neighbours.
    pub fn suppress(&mut self, v: usize) {
        debug_assert_eq!(self.adj[v].len(), 2);
        let (x, y) = (self.adj[v][0], self.adj[v][1]);
        self.adj[v].clear();
        self.alive[v] = false;
        self.adj[x].retain(|&w| w != v);
        self.adj[y].retain(|&w| w != v);
        self.connect(x, y);
    }

    pub fn suppress_all(&mut self) {
        for v in 0..self.adj.len() {
            if self.alive[v] && self.labels[v].is_none() && self.adj[v].len() == 2 {
                self.suppress(v);
            }
        }
    }

    /// Deletes a vertex together with its incident edges.
    pub fn delete_vertex(&mut self, v: usize) {
        for w in std::mem::take(&mut self.adj[v]) {
            self.adj[w].retain(|&x| x != v);
        }
        self.alive[v] = false;
    }

    /// Repeatedly deletes unlabelled vertices of degree at most one.
    pub fn prune_unlabelled_leaves(&mut self) {
        let mut stack: Vec<usize> = (0..self.adj.len())
            .filter(|&v| self.alive[v] && self.labels[v].is_none() && self.adj[v].len() <= 1)
            .collect();
        while let Some(v) = stack.pop() {
            if !self.alive[v] {
                continue;
            }
            let ns = self.adj[v].clone();
            self.delete_vertex(v);
            for w in ns {
                if self.alive[w] && self.labels[w].is_none() && self.adj[w].len() <= 1 {
                    stack.push(w);
                }
            }
        }
    }

    /// Vertices reachable from `v` without crossing deleted edges.
    pub fn component(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &w in &self.adj[x] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Compacts live vertices (keeping their relative order) and validates.
    pub fn finish(self) -> Result<PhyloTree> {
        let mut map = vec![usize::MAX; self.adj.len()];
        let mut next = 0;
        for v in 0..self.adj.len() {
            if self.alive[v] {
                map[v] = next;
                next += 1;
            }
        }
        let mut adj = vec![Vec::new(); next];
        let mut labels = vec![None; next];
        for v in 0..self.adj.len() {
            if self.alive[v] {
                adj[map[v]] = self.adj[v].iter().map(|&w| map[w]).collect();
                labels[map[v]] = self.labels[v].clone();
            }
        }
        PhyloTree::from_adjacency(adj, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;

    fn t(s: &str) -> PhyloTree {
        parse_newick(s).unwrap()
    }

    #[test]
    fn counts_follow_binarity() {
        let tree = t("(a,(b,c),(d,e));");
        assert_eq!(tree.num_taxa(), 5);
        assert_eq!(tree.num_vertices(), 8);
        assert_eq!(tree.num_edges(), 7);
        assert_eq!(
            tree.cherries(),
            vec![
                (Taxon::new("b"), Taxon::new("c")),
                (Taxon::new("d"), Taxon::new("e"))
            ]
        );
    }

    #[test]
    fn restriction_of_caterpillar() {
        let tree = t("(a,b,(c,(d,e)));");
        assert_eq!(tree.restrict(["a", "c", "e"]).unwrap().to_newick(), "(a,c,e);");
        assert!(tree.restrict(tree.taxa().cloned().collect::<Vec<_>>()).unwrap() == tree);
        let single = tree.restrict(["d"]).unwrap();
        assert_eq!(single.num_taxa(), 1);
        assert_eq!(single.num_vertices(), 1);
        assert!(matches!(tree.restrict(["q"]), Err(Error::UnknownTaxon(_))));
        assert!(matches!(tree.restrict(Vec::<&str>::new()), Err(Error::EmptyTaxa)));
    }

    #[test]
    fn nested_restriction_commutes() {
        let tree = t("((a,b),(c,d),((e,f),(g,h)));");
        let y = ["a", "c", "d", "e", "g", "h"];
        let z = ["a", "d", "g", "h"];
        assert!(tree.restrict(y).unwrap().restrict(z).unwrap() == tree.restrict(z).unwrap());
    }

    #[test]
    fn embedding_of_cherry_is_two_pendant_edges() {
        let tree = t("(a,(b,c),(d,e));");
        let emb = tree.embedding(["b", "c"]).unwrap();
        assert_eq!(emb.len(), 2);
        for e in &emb {
            let (u, v) = e.endpoints();
            assert!(tree.is_leaf(u) || tree.is_leaf(v));
        }
        assert_eq!(tree.embedding(tree.taxon_set()).unwrap().len(), tree.num_edges());
    }

    #[test]
    fn relabel_rejects_collision() {
        let tree = t("(a,b,(c,d));");
        assert!(tree.relabel("a", Taxon::new("b")).is_err());
        assert_eq!(tree.relabel("a", Taxon::new("z")).unwrap().to_newick(), "(b,(c,d),z);");
    }
}
