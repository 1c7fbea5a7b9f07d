//! A pair of trees on one taxon set, plus the fresh-label counter shared by
//! the reductions that mint labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{PhyloTree, Taxon, FRESH_PREFIX};

/// Which tree plays the role of T in a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orient {
    /// T is the first tree.
    Forward,
    /// T is the second tree.
    Swapped,
}

impl Orient {
    pub const BOTH: [Orient; 2] = [Orient::Forward, Orient::Swapped];

    pub fn flip(self) -> Orient {
        match self {
            Orient::Forward => Orient::Swapped,
            Orient::Swapped => Orient::Forward,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TreePair {
    pub t: PhyloTree,
    pub tp: PhyloTree,
    next_fresh: u64,
}

impl TreePair {
    pub fn new(t: PhyloTree, tp: PhyloTree) -> Result<Self> {
        if !t.taxa().eq(tp.taxa()) {
            return Err(Error::TaxonMismatch);
        }
        let next_fresh = t
            .taxa()
            .filter_map(|x| x.as_str().strip_prefix(FRESH_PREFIX)?.parse::<u64>().ok())
            .map(|n| n + 1)
            .max()
            .unwrap_or(0);
        Ok(TreePair { t, tp, next_fresh })
    }

    pub fn num_taxa(&self) -> usize {
        self.t.num_taxa()
    }

    pub fn next_fresh(&self) -> u64 {
        self.next_fresh
    }

    /// Mints the next unused `_z<counter>` label.
    pub fn fresh(&mut self) -> Taxon {
        loop {
            let label = format!("{FRESH_PREFIX}{}", self.next_fresh);
            self.next_fresh += 1;
            if !self.t.contains(&label) {
                return Taxon::new(&label);
            }
        }
    }

    /// (T, T') in the roles given by `o`.
    pub fn oriented(&self, o: Orient) -> (&PhyloTree, &PhyloTree) {
        match o {
            Orient::Forward => (&self.t, &self.tp),
            Orient::Swapped => (&self.tp, &self.t),
        }
    }

    /// New pair from trees given in the roles of `o`, keeping the counter.
    pub fn rebuild(&self, o: Orient, x: PhyloTree, y: PhyloTree) -> Result<TreePair> {
        let (t, tp) = match o {
            Orient::Forward => (x, y),
            Orient::Swapped => (y, x),
        };
        if !t.taxa().eq(tp.taxa()) {
            return Err(Error::Invariant("reduction produced mismatched taxon sets".into()));
        }
        Ok(TreePair {
            t,
            tp,
            next_fresh: self.next_fresh,
        })
    }

    /// Same pair with both trees restricted to X minus `remove`.
    pub fn without<S: AsRef<str>>(&self, remove: &[S]) -> Result<TreePair> {
        Ok(TreePair {
            t: self.t.remove_taxa(remove)?,
            tp: self.tp.remove_taxa(remove)?,
            next_fresh: self.next_fresh,
        })
    }

    /// Canonical two-line form; equal strings mean equal pairs.
    pub fn canonical(&self) -> String {
        format!("{}\n{}\n", self.t.to_newick(), self.tp.to_newick())
    }
}
