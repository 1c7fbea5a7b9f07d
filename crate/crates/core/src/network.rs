//! Generators (cubic multigraphs), their decoration with taxa, and the trees
//! a decorated generator displays once one edge per independent cycle is cut.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Editor, PhyloTree, Taxon};

/// A connected cubic multigraph. Sides are its edges; parallel sides are
/// allowed, loops are not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub num_vertices: usize,
    pub sides: Vec<(usize, usize)>,
}

impl Generator {
    /// The 2 × (k+1) grid with its four corners suppressed. Vertices
    /// 0..k-1 form the top rail, k-1..2k-2 the bottom rail. Sides are listed
    /// as: top rail, bottom rail, interior rungs, then the two end arcs.
    pub fn ladder(k: usize) -> Result<Generator> {
        if k < 3 {
            return Err(Error::Precondition("the ladder needs k ≥ 3".into()));
        }
        let m = k - 1;
        let top = |i: usize| i;
        let bot = |i: usize| m + i;
        let mut sides = Vec::new();
        for i in 0..m - 1 {
            sides.push((top(i), top(i + 1)));
        }
        for i in 0..m - 1 {
            sides.push((bot(i), bot(i + 1)));
        }
        for i in 0..m {
            sides.push((top(i), bot(i)));
        }
        sides.push((top(0), bot(0)));
        sides.push((top(m - 1), bot(m - 1)));
        Ok(Generator {
            num_vertices: 2 * m,
            sides,
        })
    }

    /// |E| − (|V| − 1).
    pub fn reticulation_number(&self) -> usize {
        self.sides.len() + 1 - self.num_vertices
    }

    pub fn is_cubic(&self) -> bool {
        let mut deg = vec![0; self.num_vertices];
        for &(u, v) in &self.sides {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.iter().all(|&d| d == 3)
    }

    /// Number of unordered pairs of parallel sides.
    pub fn multi_edge_pairs(&self) -> usize {
        let key = |&(u, v): &(usize, usize)| (u.min(v), u.max(v));
        let mut n = 0;
        for i in 0..self.sides.len() {
            for j in i + 1..self.sides.len() {
                if key(&self.sides[i]) == key(&self.sides[j]) {
                    n += 1;
                }
            }
        }
        n
    }

    /// A random connected loopless cubic multigraph on `2(k−1)` vertices.
    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Generator> {
        if k < 2 {
            return Err(Error::Precondition("a generator needs k ≥ 2".into()));
        }
        let n = 2 * (k - 1);
        loop {
            let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
            stubs.shuffle(rng);
            let sides: Vec<(usize, usize)> = stubs.chunks(2).map(|p| (p[0], p[1])).collect();
            if sides.iter().any(|&(u, v)| u == v) {
                continue;
            }
            let g = Generator {
                num_vertices: n,
                sides,
            };
            if g.is_connected() {
                return Ok(g);
            }
        }
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.sides {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// A breakpoint: the `position`-th edge on the path of `side`, counted from
/// the side's first endpoint. A side with m taxa has positions 0..=m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Breakpoint {
    pub side: usize,
    pub position: usize,
}

/// A generator with an ordered list of taxa on each side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub generator: Generator,
    pub decoration: Vec<Vec<Taxon>>,
}

impl Network {
    pub fn new(generator: Generator, decoration: Vec<Vec<Taxon>>) -> Result<Network> {
        if decoration.len() != generator.sides.len() {
            return Err(Error::Precondition("one taxon list per side is required".into()));
        }
        Ok(Network {
            generator,
            decoration,
        })
    }

    pub fn taxa(&self) -> impl Iterator<Item = &Taxon> {
        self.decoration.iter().flatten()
    }

    pub fn num_taxa(&self) -> usize {
        self.decoration.iter().map(Vec::len).sum()
    }

    /// The tree displayed after deleting the breakpoint edges, with unlabelled
    /// leaves pruned and degree-2 vertices suppressed. Fails unless exactly
    /// one edge per independent cycle is cut and the rest stays connected.
    pub fn display_tree(&self, cuts: &[Breakpoint]) -> Result<PhyloTree> {
        if cuts.len() != self.generator.reticulation_number() {
            return Err(Error::Instance(format!(
                "{} breakpoints given, {} needed",
                cuts.len(),
                self.generator.reticulation_number()
            )));
        }
        let mut ed = Editor::empty();
        for _ in 0..self.generator.num_vertices {
            ed.add_vertex(None);
        }
        let mut first_leaf = None;
        for (s, &(u, w)) in self.generator.sides.iter().enumerate() {
            let taxa = &self.decoration[s];
            let mut path = vec![u];
            for t in taxa {
                let v = ed.add_vertex(None);
                let leaf = ed.add_vertex(Some(t.clone()));
                first_leaf.get_or_insert(leaf);
                ed.connect(v, leaf);
                path.push(v);
            }
            path.push(w);
            for i in 0..path.len() - 1 {
                let cut = cuts.iter().any(|b| b.side == s && b.position == i);
                if !cut {
                    ed.connect(path[i], path[i + 1]);
                }
            }
            if let Some(b) = cuts.iter().find(|b| b.side == s && b.position >= path.len() - 1) {
                return Err(Error::Instance(format!("breakpoint {b:?} is off its side")));
            }
        }
        let Some(start) = first_leaf else {
            return Err(Error::Instance("network has no taxa".into()));
        };
        let comp = ed.component(start);
        if comp.len() != ed.adj.len() {
            return Err(Error::Instance("breakpoints disconnect the network".into()));
        }
        ed.prune_unlabelled_leaves();
        ed.suppress_all();
        ed.finish()
    }
}
