//! Randomized laws over seeded instances.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{parsimony, restricted_splits};
use tbrkern::parsimony::fitch_score_rooted;
use tbrkern::tbr::random_tbr;
use tbrkern::{
    kernelize, mp_lower_bound, parse_newick, random_instance, tbr_distance, BinaryCharacter, TraceFile,
};

fn random_character(taxa: &[String], seed: u64) -> BTreeMap<String, u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    taxa.iter().map(|t| (t.clone(), rng.gen_range(0..=1u8))).collect()
}

fn as_character(f: &BTreeMap<String, u8>) -> BinaryCharacter {
    BinaryCharacter::new(f.iter().map(|(t, &s)| (tbrkern::Taxon::new(t), s)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn newick_round_trip(n in 4usize..30, seed in any::<u64>()) {
        let (t, _) = random_instance(n, 0, seed).unwrap();
        let text = t.to_newick();
        let back = parse_newick(&text).unwrap();
        prop_assert_eq!(back.to_newick(), text);
        prop_assert_eq!(restricted_splits(&back, &common::labels(&t)), restricted_splits(&t, &common::labels(&t)));
    }

    #[test]
    fn restriction_keeps_induced_splits(n in 5usize..20, seed in any::<u64>(), mask in any::<u32>()) {
        let (t, _) = random_instance(n, 0, seed).unwrap();
        let all: Vec<String> = t.taxa().map(|x| x.to_string()).collect();
        let keep: BTreeSet<String> = all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x.clone()).collect();
        prop_assume!(keep.len() >= 3);
        let r = t.restrict(keep.iter()).unwrap();
        prop_assert_eq!(common::labels(&r), keep.clone());
        prop_assert_eq!(restricted_splits(&r, &keep), restricted_splits(&t, &keep));
    }

    #[test]
    fn moves_keep_taxa_and_binarity(n in 4usize..25, seed in any::<u64>()) {
        let (t, _) = random_instance(n, 0, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let moved = random_tbr(&t, &mut rng).unwrap();
        prop_assert!(moved.validate().is_ok());
        prop_assert_eq!(common::labels(&moved), common::labels(&t));
        prop_assert!(tbr_distance(&t, &moved, 1).unwrap().is_some());
    }

    #[test]
    fn trace_replays_to_kernel(n in 6usize..22, moves in 0usize..5, seed in any::<u64>()) {
        let (t, tp) = random_instance(n, moves, seed).unwrap();
        let r = kernelize(&t, &tp).unwrap();
        let file = TraceFile::from_json(&r.trace_file().to_json()).unwrap();
        prop_assert_eq!(file.replay().unwrap().canonical(), r.kernel.canonical());
        let removed: i64 = r.trace.iter().map(|e| e.taxa_removed).sum();
        prop_assert_eq!(removed, r.original_taxa as i64 - r.kernel_taxa as i64);
        prop_assert_eq!(r.trace.iter().map(|e| e.delta_k).sum::<usize>(), r.offset);
    }

    #[test]
    fn fitch_is_root_independent(n in 4usize..20, seed in any::<u64>()) {
        let (t, _) = random_instance(n, 0, seed).unwrap();
        let taxa: Vec<String> = t.taxa().map(|x| x.to_string()).collect();
        let f = random_character(&taxa, seed);
        let ch = as_character(&f);
        let expected = parsimony(&t, &f);
        let internal: Vec<usize> = (0..t.num_vertices()).filter(|&v| !t.is_leaf(v)).collect();
        for &root in internal.iter().take(3) {
            prop_assert_eq!(fitch_score_rooted(&t, &ch, root).unwrap(), expected);
        }
    }
}

#[test]
fn distance_accounting_across_the_kernel() {
    let bad: Vec<u64> = (0..200u64)
        .into_par_iter()
        .filter(|&seed| {
            let n = 6 + (seed % 7) as usize;
            let moves = 1 + (seed % 4) as usize;
            let (t, tp) = random_instance(n, moves, seed).unwrap();
            let r = kernelize(&t, &tp).unwrap();
            let whole = tbr_distance(&t, &tp, 4).unwrap();
            let kernel = tbr_distance(r.t(), r.tp(), 4).unwrap();
            whole != kernel.map(|k| k + r.offset)
        })
        .collect();
    assert!(bad.is_empty(), "mismatched seeds {bad:?}");
}

#[test]
fn parsimony_gap_never_exceeds_distance() {
    for seed in 0..60u64 {
        let n = 6 + (seed % 6) as usize;
        let moves = 1 + (seed % 3) as usize;
        let (t, tp) = random_instance(n, moves, seed).unwrap();
        let d = tbr_distance(&t, &tp, moves).unwrap().expect("at most `moves` apart");
        assert!(d <= moves);
        let taxa: Vec<String> = t.taxa().map(|x| x.to_string()).collect();
        for j in 0..5 {
            let f = random_character(&taxa, seed * 8 + j);
            assert!(mp_lower_bound(&t, &tp, &as_character(&f)).unwrap() <= d, "seed {seed}");
        }
    }
}

#[test]
fn distance_is_symmetric() {
    for seed in 0..40u64 {
        let (t, tp) = random_instance(9, 3, seed).unwrap();
        assert_eq!(tbr_distance(&t, &tp, 3).unwrap(), tbr_distance(&tp, &t, 3).unwrap());
    }
}
