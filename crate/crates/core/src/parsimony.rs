//! Binary characters and Fitch parsimony.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{PhyloTree, Taxon};

/// A total map from taxa to {0, 1}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinaryCharacter {
    pub assignment: BTreeMap<Taxon, u8>,
}

impl BinaryCharacter {
    pub fn new(assignment: BTreeMap<Taxon, u8>) -> Self {
        BinaryCharacter { assignment }
    }

    /// Character with value 1 exactly on `ones`.
    pub fn indicator<'a, I>(all: I, ones: &std::collections::BTreeSet<Taxon>) -> Self
    where
        I: IntoIterator<Item = &'a Taxon>,
    {
        BinaryCharacter {
            assignment: all
                .into_iter()
                .map(|t| (t.clone(), u8::from(ones.contains(t))))
                .collect(),
        }
    }

    pub fn get(&self, t: &str) -> Option<u8> {
        self.assignment.get(t).copied()
    }
}

/// Parsimony score of `f` on `tree`, rooted at the internal vertex next to
/// the smallest taxon.
pub fn fitch_score(tree: &PhyloTree, f: &BinaryCharacter) -> Result<usize> {
    let root = if tree.num_taxa() >= 3 {
        tree.parent(tree.taxa().next().unwrap().as_str())
    } else {
        0
    };
    fitch_score_rooted(tree, f, root)
}

/// Parsimony score with an explicit root vertex. The score does not depend
/// on the root.
pub fn fitch_score_rooted(tree: &PhyloTree, f: &BinaryCharacter, root: usize) -> Result<usize> {
    for t in tree.taxa() {
        match f.get(t.as_str()) {
            Some(0) | Some(1) => {}
            Some(v) => return Err(Error::Precondition(format!("state {v} for {t} is not binary"))),
            None => return Err(Error::Precondition(format!("character undefined on {t}"))),
        }
    }
    // Iterative post-order from `root`.
    let n = tree.num_vertices();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
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
    // State sets as bitmasks: bit 0 for state 0, bit 1 for state 1.
    let mut sets = vec![0u8; n];
    let mut score = 0;
    for &v in order.iter().rev() {
        let mut acc: u8 = 0;
        if let Some(t) = tree.label(v) {
            acc = 1 << f.get(t.as_str()).unwrap();
        }
        for &w in tree.neighbors(v) {
            if w == parent[v] && v != root {
                continue;
            }
            if parent[w] != v {
                continue;
            }
            acc = if acc == 0 {
                sets[w]
            } else if acc & sets[w] != 0 {
                acc & sets[w]
            } else {
                score += 1;
                acc | sets[w]
            };
        }
        sets[v] = acc;
    }
    Ok(score)
}

/// |l_f(T) − l_f(T')|, a lower bound on the TBR distance.
pub fn mp_lower_bound(t: &PhyloTree, tp: &PhyloTree, f: &BinaryCharacter) -> Result<usize> {
    Ok(fitch_score(t, f)?.abs_diff(fitch_score(tp, f)?))
}
