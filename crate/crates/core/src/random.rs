//! Seeded random instances: a random tree and a copy perturbed by random
//! TBR moves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tbr::{random_tbr, random_tree};
use crate::tree::{PhyloTree, Taxon};

/// Labels `t01`, `t02`, … padded to a common width.
pub fn default_labels(n: usize) -> Vec<Taxon> {
    let width = n.to_string().len().max(2);
    (1..=n).map(|i| Taxon::new(&format!("t{i:0width$}"))).collect()
}

/// A random tree on `n` taxa and the result of `k_moves` random TBR moves on
/// it, so the pair is at distance at most `k_moves`. The same seed always
/// gives the same pair.
pub fn random_instance(n: usize, k_moves: usize, seed: u64) -> Result<(PhyloTree, PhyloTree)> {
    if n < 4 {
        return Err(Error::Precondition("random instances need n ≥ 4".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_tree(&default_labels(n), &mut rng)?;
    let mut tp = t.clone();
    for _ in 0..k_moves {
        tp = random_tbr(&tp, &mut rng)?;
    }
    Ok((t, tp))
}
