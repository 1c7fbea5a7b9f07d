//! Worked examples for the public operations, checked end to end.

mod common;

use std::collections::BTreeMap;

use common::{is_agreement_forest, labels, nwk, parsimony, set};
use tbrkern::maf::{enumerate_mafs, forest_uses_edge, maf_avoiding_edge, maf_preserving};
use tbrkern::reduce::new::find_interrupted_4chains;
use tbrkern::tight::tight_instance;
use tbrkern::{
    check_kernel_bound, exact_tbr_distance, fitch_score, kernel_bound, kernel_bound_note, kernelize,
    mp_lower_bound, random_instance, tbr_distance, BinaryCharacter, EdgeRef, PhyloTree, Taxon,
};

/// A seven-taxon pair whose only maximum agreement forest is
/// {{a,b,c,d},{e,f,g}}.
const UNIQUE_T: &str = "((a,b),(c,d),(e,(f,g)));";
const UNIQUE_TP: &str = "(a,b,((c,((e,f),g)),d));";

fn forest_sets(t: &PhyloTree, tp: &PhyloTree) -> Vec<Vec<Vec<String>>> {
    enumerate_mafs(t, tp)
        .unwrap()
        .iter()
        .map(|f| f.blocks.iter().map(|b| b.iter().map(|x| x.to_string()).collect()).collect())
        .collect()
}

fn character(ones: &[&str], tree: &PhyloTree) -> BinaryCharacter {
    let ones = tbrkern::tree::taxa(ones.iter().copied());
    BinaryCharacter::indicator(tree.taxa(), &ones)
}

#[test]
fn unique_maf_pair() {
    let (t, tp) = (nwk(UNIQUE_T), nwk(UNIQUE_TP));
    let mafs = forest_sets(&t, &tp);
    assert_eq!(mafs, vec![vec![vec!["a", "b", "c", "d"], vec!["e", "f", "g"]]]);
    let blocks = [set(&["a", "b", "c", "d"]), set(&["e", "f", "g"])];
    assert!(is_agreement_forest(&t, &tp, &blocks));
    assert_eq!(tbr_distance(&t, &tp, 3).unwrap(), Some(1));
}

#[test]
fn whole_taxon_set_as_a_forest() {
    let t = nwk("(a,b,(c,(d,e)));");
    assert!(is_agreement_forest(&t, &t, &[labels(&t)]));
    let (q, s) = (nwk("(a,b,(c,d));"), nwk("(a,c,(b,d));"));
    assert!(!is_agreement_forest(&q, &s, &[labels(&q)]));
    let c = exact_tbr_distance(&t, &t, 2).unwrap().unwrap();
    assert_eq!((c.k, c.forest.len()), (0, 1));
}

#[test]
fn quartet_swap_forests() {
    let (q, s) = (nwk("(a,b,(c,d));"), nwk("(a,c,(b,d));"));
    let c = exact_tbr_distance(&q, &s, 2).unwrap().unwrap();
    assert_eq!(c.k, 1);
    let mafs = enumerate_mafs(&q, &s).unwrap();
    assert!(!mafs.is_empty());
    for f in &mafs {
        assert_eq!(f.len(), 2);
        let blocks: Vec<_> = f.blocks.iter().map(|b| b.iter().map(|x| x.to_string()).collect()).collect();
        assert!(is_agreement_forest(&q, &s, &blocks));
    }
    // Removing any one taxon leaves three, which always agree.
    for x in ["a", "b", "c", "d"] {
        assert!(mafs.iter().any(|f| f.has_singleton(x)));
    }
}

#[test]
fn preserving_a_pendant_pair() {
    // A 6-leaf pair at distance 1 whose common cherry {a,b} is pendant.
    let t = nwk("((a,b),c,(d,(e,f)));");
    let tp = nwk("((a,b),d,(c,(e,f)));");
    assert_eq!(tbr_distance(&t, &tp, 2).unwrap(), Some(1));
    assert!(maf_preserving::<&str>(&t, &tp, &[]).unwrap().is_some());
    let f = maf_preserving(&t, &tp, &[vec!["a", "b"]]).unwrap().unwrap();
    assert!(f.preserves(&["a", "b"]));
    assert!(maf_preserving(&t, &tp, &[vec!["a", "b"], vec!["b", "c"]]).is_err());
}

#[test]
fn avoiding_edges() {
    let (q, s) = (nwk("(a,b,(c,d));"), nwk("(a,c,(b,d));"));
    let leaf = s.leaf("a").unwrap();
    let pendant = EdgeRef::new(leaf, s.parent("a"));
    let f = maf_avoiding_edge(&q, &s, pendant).unwrap().unwrap();
    assert!(f.has_singleton("a"));
    assert!(!forest_uses_edge(&s, &f, pendant).unwrap());

    let t = nwk("(a,b,(c,(d,(e,f))));");
    let (pc, pd) = (t.parent("c"), t.parent("d"));
    assert!(maf_avoiding_edge(&t, &t, EdgeRef::new(pc, pd)).unwrap().is_none());
}

#[test]
fn minimal_interrupted_chain() {
    // T has the 4-chain (a,b,c,d); in T' leaf s sits between b and c.
    let t = nwk("(x,y,(a,(b,(c,(d,(s,z))))));");
    let tp = nwk("(x,y,(a,(b,(s,(c,(d,z))))));");
    let found = find_interrupted_4chains(&t, &tp).unwrap();
    let chain: Vec<Taxon> = ["a", "b", "c", "d"].map(Taxon::new).to_vec();
    let hit = found
        .iter()
        .find(|c| c.chain == chain || c.chain.iter().rev().eq(chain.iter()))
        .expect("chain reported");
    let s_leaf = tp.leaf("s").unwrap();
    assert_eq!(hit.interrupter, EdgeRef::new(s_leaf, tp.parent("s")));
    let f = maf_avoiding_edge(&t, &tp, hit.interrupter).unwrap().unwrap();
    assert!(!forest_uses_edge(&tp, &f, hit.interrupter).unwrap());

    // With s back in place the chain is common, so nothing is interrupted.
    assert!(find_interrupted_4chains(&t, &t).unwrap().is_empty());
}

#[test]
fn identical_trees_kernelize_to_a_residue() {
    let t = nwk("(a,b,(c,(d,(e,(f,(g,h))))));");
    let r = kernelize(&t, &t).unwrap();
    assert_eq!(r.offset, 0);
    assert!(r.kernel_taxa <= 4);
    assert_eq!(tbr_distance(r.t(), r.tp(), 1).unwrap(), Some(0));
}

#[test]
fn tight_pair_is_irreducible_and_within_bound() {
    let ti = tight_instance(3).unwrap();
    let r = kernelize(&ti.t, &ti.tp).unwrap();
    assert!(r.trace.is_empty());
    assert_eq!(r.t().to_newick(), ti.t.to_newick());
    assert_eq!(r.tp().to_newick(), ti.tp.to_newick());
    assert_eq!(r.kernel_taxa, 18);
    assert_eq!(kernel_bound(3), Some(19));
    assert!(check_kernel_bound(&r, 3));
}

#[test]
fn no_bound_below_distance_three() {
    let (t, tp) = random_instance(30, 2, 11).unwrap();
    let r = kernelize(&t, &tp).unwrap();
    assert_eq!(kernel_bound(2), None);
    assert!(check_kernel_bound(&r, 2));
    assert!(kernel_bound_note(2).is_some());
}

#[test]
fn random_pair_distance_splits_into_kernel_and_offset() {
    for seed in 0..5 {
        let (t, tp) = random_instance(20, 3, seed).unwrap();
        let r = kernelize(&t, &tp).unwrap();
        let whole = tbr_distance(&t, &tp, 3).unwrap().expect("three moves or fewer");
        let kernel = tbr_distance(r.t(), r.tp(), 3).unwrap().unwrap();
        assert_eq!(whole, kernel + r.offset, "seed {seed}");
    }
}

#[test]
fn tight_certificates_at_five_and_eight() {
    for k in [5, 8] {
        let ti = tight_instance(k).unwrap();
        assert_eq!(ti.t.num_taxa(), 9 * k - 9);
        assert!(mp_lower_bound(&ti.t, &ti.tp, &ti.character).unwrap() >= k);
        let blocks: Vec<_> = ti
            .forest
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| x.to_string()).collect())
            .collect();
        assert_eq!(blocks.len(), k + 1);
        assert!(is_agreement_forest(&ti.t, &ti.tp, &blocks));
    }
}

#[test]
fn parsimony_examples() {
    let t = nwk("(a,b,(c,(d,e)));");
    assert_eq!(fitch_score(&t, &character(&[], &t)).unwrap(), 0);
    assert_eq!(fitch_score(&t, &character(&["d", "e"], &t)).unwrap(), 1);
    let f: BTreeMap<String, u8> = ["a", "b", "c", "d", "e"]
        .iter()
        .map(|x| (x.to_string(), u8::from(*x == "a" || *x == "c")))
        .collect();
    let ch = character(&["a", "c"], &t);
    assert_eq!(fitch_score(&t, &ch).unwrap(), parsimony(&t, &f));
    assert_eq!(mp_lower_bound(&t, &t, &ch).unwrap(), 0);
}

#[test]
fn random_instances() {
    let (t, tp) = random_instance(15, 0, 3).unwrap();
    assert_eq!(t.to_newick(), tp.to_newick());
    let a = random_instance(15, 3, 99).unwrap();
    let b = random_instance(15, 3, 99).unwrap();
    assert_eq!((a.0.to_newick(), a.1.to_newick()), (b.0.to_newick(), b.1.to_newick()));
    assert!(random_instance(3, 1, 0).is_err());
}
