//! Seeded property suites shared by the `verify` command and the acceptance
//! tests.
//!
//! Each suite draws its instances from a deterministic stream derived from
//! the base seed, evaluates them in parallel batches and consumes the results
//! in index order, so a report depends only on the seed and configuration.
//! A failing suite keeps the smallest failing instance as its counterexample.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{common_chains, cpt_eligible};
use crate::error::{Error, Result};
use crate::kernel::{kernel_bound, kernelize_with};
use crate::maf::{tbr_ball, is_agreement_forest, maf_avoiding_edge, maf_preserving, tbr_distance};
use crate::newick::parse_newick;
use crate::pair::{Orient, TreePair};
use crate::parsimony::mp_lower_bound;
use crate::random::{default_labels, random_instance};
use crate::reduce::classic::{extend_chain, End};
use crate::reduce::eligibility::{algorithm1_eligible, algorithm2_eligible, exact_p_eligible, exact_r10_eligible};
use crate::reduce::new::{apply_op_p, find_interrupted_4chains, p_tuples, r10_tuples};
use crate::reduce::{reduce, KernelConfig, ReductionEvent, Rule};
use crate::tbr::{all_trees, random_tbr, random_tree, tbr_move};
use crate::tight::tight_instance;
use crate::tree::{EdgeRef, PhyloTree, Taxon};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Cut oracle against breadth-first search over TBR moves.
    Oracle,
    /// Distance change of every rule and of Operation P.
    Rules,
    /// Kernel size against the bound, plus distance accounting.
    Bound,
    /// The tight family and its certificates.
    Tight,
    /// Chain preservation.
    Cpt,
    /// Interrupted 4-chains.
    Interrupted,
    /// Soundness of the catalog eligibility tests.
    Eligibility,
    /// Repeated runs give identical output.
    Determinism,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Oracle,
        Suite::Rules,
        Suite::Bound,
        Suite::Tight,
        Suite::Cpt,
        Suite::Interrupted,
        Suite::Eligibility,
        Suite::Determinism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Rules => "rules",
            Suite::Bound => "bound",
            Suite::Tight => "tight",
            Suite::Cpt => "cpt",
            Suite::Interrupted => "interrupted",
            Suite::Eligibility => "eligibility",
            Suite::Determinism => "determinism",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        let key = s.trim().to_ascii_lowercase();
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == key)
            .ok_or_else(|| Error::Precondition(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Passed to every kernelization; `skip` injects faults.
    pub kernel: KernelConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub t: String,
    pub tp: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: usize,
    smallest: Option<(usize, Counterexample)>,
    /// Failure that is not tied to one instance, such as too few instances.
    shortfall: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, t: &PhyloTree, tp: &PhyloTree, note: impl FnOnce() -> String) {
        self.checked += 1;
        if ok {
            return;
        }
        self.failures += 1;
        let n = t.num_taxa();
        if self.smallest.as_ref().is_none_or(|(m, _)| n < *m) {
            self.smallest = Some((
                n,
                Counterexample {
                    t: t.to_newick(),
                    tp: tp.to_newick(),
                    note: note(),
                },
            ));
        }
    }

    fn require(&mut self, have: usize, want: usize, what: &str) {
        if have < want {
            self.shortfall = Some(format!("only {have} of {want} {what}"));
        }
    }

    fn report(self, suite: Suite, summary: String) -> SuiteReport {
        let summary = match &self.shortfall {
            Some(s) => format!("{summary}; {s}"),
            None => summary,
        };
        SuiteReport {
            suite,
            passed: self.failures == 0 && self.shortfall.is_none(),
            checked: self.checked,
            failures: self.failures,
            summary,
            counterexample: self.smallest.map(|(_, c)| c),
        }
    }
}

/// Seed of instance `i` in stream `stream`.
fn sub_seed(base: u64, stream: u64, i: u64) -> u64 {
    base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ i.wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

const BATCH: u64 = 64;

/// Runs `eval` on indices `0..limit` in parallel batches and feeds the
/// results to `take` in index order until it returns `true`.
fn search<T, F, G>(limit: u64, eval: F, mut take: G) -> Result<()>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
    G: FnMut(T) -> Result<bool>,
{
    let mut start = 0;
    while start < limit {
        let end = (start + BATCH).min(limit);
        let batch: Vec<T> = (start..end).into_par_iter().map(&eval).collect::<Result<_>>()?;
        for item in batch {
            if take(item)? {
                return Ok(());
            }
        }
        start = end;
    }
    Ok(())
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    match suite {
        Suite::Oracle => oracle_suite(),
        Suite::Rules => rules_suite(cfg),
        Suite::Bound => bound_suite(cfg),
        Suite::Tight => tight_suite(),
        Suite::Cpt => cpt_suite(cfg),
        Suite::Interrupted => interrupted_suite(cfg),
        Suite::Eligibility => eligibility_suite(cfg),
        Suite::Determinism => determinism_suite(cfg),
    }
}

pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    suites.iter().map(|&s| run_suite(s, cfg)).collect()
}

// ---------------------------------------------------------------- oracle

pub const ORACLE_K_MAX: usize = 2;

fn oracle_suite() -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let labels = default_labels(6);
    let mut counts = Vec::new();
    for n in [5, 6] {
        let trees = all_trees(&labels[..n])?;
        let rows: Vec<Vec<(Option<usize>, Option<usize>)>> = trees
            .par_iter()
            .map(|t| {
                let ball = tbr_ball(t, ORACLE_K_MAX);
                trees
                    .iter()
                    .map(|tp| Ok((tbr_distance(t, tp, ORACLE_K_MAX)?, ball.get(&tp.to_newick()).copied())))
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (i, row) in rows.iter().enumerate() {
            for (j, &(cut, moves)) in row.iter().enumerate() {
                tally.check(cut == moves, &trees[i], &trees[j], || {
                    format!("cut oracle {cut:?}, move search {moves:?}")
                });
            }
        }
        counts.push(trees.len() * trees.len());
    }
    Ok(tally.report(
        Suite::Oracle,
        format!("{} + {} ordered pairs on 5 and 6 taxa, k_max {ORACLE_K_MAX}", counts[0], counts[1]),
    ))
}

// ----------------------------------------------------------------- rules

pub const RULE_TARGET: usize = 10;
pub const RULE_MAX_TAXA: usize = 14;
const RULE_K_MAX: usize = 6;
const RULE_SEED_LIMIT: u64 = 20_000;

/// One application of `rule`, Operation P included.
fn apply_any(rule: Rule, pair: &TreePair, cfg: &KernelConfig) -> Result<Option<(TreePair, ReductionEvent)>> {
    if rule != Rule::OpP {
        return reduce(rule, pair, cfg);
    }
    for o in Orient::BOTH {
        let (x, y) = pair.oriented(o);
        for w in p_tuples(x, y) {
            let w: Vec<&str> = w.iter().map(Taxon::as_str).collect();
            if let Some(r) = apply_op_p(pair, o, &w, cfg)? {
                return Ok(Some(r));
            }
        }
    }
    Ok(None)
}

/// Every rule plus Operation P.
pub fn rule_targets() -> Vec<Rule> {
    let mut v = Rule::ORDERED.to_vec();
    v.push(Rule::OpP);
    v
}

/// Instance `i` of the per-rule stream: 8 to 14 taxa, 1 to 4 moves.
pub fn rule_instance(seed: u64, i: u64) -> Result<TreePair> {
    let n = 8 + (i % 7) as usize;
    let moves = 1 + ((i / 7) % 4) as usize;
    let (t, tp) = random_instance(n, moves, sub_seed(seed, 1, i))?;
    TreePair::new(t, tp)
}

/// Applications found for each target rule, in stream order, at most
/// `RULE_TARGET` per rule.
pub fn rule_applications(cfg: &VerifyConfig) -> Result<Vec<(Rule, Vec<(TreePair, TreePair, ReductionEvent)>)>> {
    let targets = rule_targets();
    let mut found: Vec<Vec<(TreePair, TreePair, ReductionEvent)>> = vec![Vec::new(); targets.len()];
    search(
        RULE_SEED_LIMIT,
        |i| {
            let pair = rule_instance(cfg.seed, i)?;
            let mut hits = Vec::new();
            for (r, &rule) in targets.iter().enumerate() {
                if let Some((next, ev)) = apply_any(rule, &pair, &cfg.kernel)? {
                    hits.push((r, next, ev));
                }
            }
            Ok((pair, hits))
        },
        |(pair, hits)| {
            for (r, next, ev) in hits {
                if found[r].len() < RULE_TARGET && pair.num_taxa() <= RULE_MAX_TAXA {
                    found[r].push((pair.clone(), next, ev));
                }
            }
            Ok(found.iter().all(|f| f.len() >= RULE_TARGET))
        },
    )?;
    Ok(targets.into_iter().zip(found).collect())
}

fn rules_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let apps = rule_applications(cfg)?;
    let mut per_rule = Vec::new();
    for (rule, list) in &apps {
        let dists: Vec<(Option<usize>, Option<usize>)> = list
            .par_iter()
            .map(|(before, after, _)| {
                Ok((
                    tbr_distance(&before.t, &before.tp, RULE_K_MAX)?,
                    tbr_distance(&after.t, &after.tp, RULE_K_MAX)?,
                ))
            })
            .collect::<Result<_>>()?;
        let mut ok = 0;
        for ((before, _, ev), (d0, d1)) in list.iter().zip(dists) {
            let good = match (d0, d1) {
                (Some(a), Some(b)) => a == b + ev.delta_k,
                _ => false,
            };
            ok += good as usize;
            tally.check(good, &before.t, &before.tp, || {
                format!("{rule} on {:?}: d before {d0:?}, after {d1:?}, delta {}", ev.witness, ev.delta_k)
            });
        }
        tally.require(list.len(), RULE_TARGET, &format!("{rule} instances"));
        per_rule.push(format!("{rule} {ok}/{}", list.len()));
    }
    Ok(tally.report(Suite::Rules, per_rule.join(", ")))
}

// ----------------------------------------------------------------- bound

pub const BOUND_TARGET: usize = 200;
pub const BOUND_MAX_TAXA: usize = 20;
pub const BOUND_MAX_MOVES: usize = 4;
const BOUND_K_MAX: usize = 5;
const BOUND_SEED_LIMIT: u64 = 5_000;
/// Taxa spliced onto a common chain of the tight pair.
pub const BOUND_CHAIN_EXTENSION: usize = 10;

struct BoundCase {
    t: PhyloTree,
    tp: PhyloTree,
    kernel_taxa: usize,
    offset: usize,
    kernel_k: Option<usize>,
    original_k: Option<usize>,
}

fn bound_case(t: PhyloTree, tp: PhyloTree, cfg: &KernelConfig, k_max: usize) -> Result<BoundCase> {
    let r = kernelize_with(&t, &tp, cfg)?;
    let kernel_k = tbr_distance(r.t(), r.tp(), k_max)?;
    let original_k = tbr_distance(&t, &tp, k_max)?;
    Ok(BoundCase {
        kernel_taxa: r.kernel_taxa,
        offset: r.offset,
        kernel_k,
        original_k,
        t,
        tp,
    })
}

fn check_bound_case(tally: &mut Tally, c: &BoundCase) -> bool {
    let Some(k) = c.kernel_k else { return false };
    if k < 3 {
        return false;
    }
    let bound = kernel_bound(k).unwrap_or(usize::MAX);
    tally.check(c.kernel_taxa <= bound, &c.t, &c.tp, || {
        format!("kernel has {} taxa at distance {k}, bound {bound}", c.kernel_taxa)
    });
    tally.check(c.original_k == Some(k + c.offset), &c.t, &c.tp, || {
        format!("distance {:?} but kernel distance {k} plus offset {}", c.original_k, c.offset)
    });
    true
}

/// The tight pair for `k` with `extra` taxa spliced onto its first common
/// 3-chain. The distance stays `k`.
pub fn extended_tight_pair(k: usize, extra: usize) -> Result<(PhyloTree, PhyloTree)> {
    let ti = tight_instance(k)?;
    let chain = common_chains(&ti.t, &ti.tp, 3)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Invariant("tight pair has no common 3-chain".into()))?;
    let chain: Vec<&str> = chain.iter().map(Taxon::as_str).collect();
    let labels: Vec<Taxon> = (1..=extra).map(|i| Taxon::new(&format!("e{i:02}"))).collect();
    extend_chain(&ti.t, &ti.tp, &chain, &labels, End::Right)
}

fn bound_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let mut random = 0;
    search(
        BOUND_SEED_LIMIT,
        |i| {
            let n = 12 + (i % 9) as usize;
            let moves = 3 + (i % 2) as usize;
            let (t, tp) = random_instance(n, moves, sub_seed(cfg.seed, 2, i))?;
            bound_case(t, tp, &cfg.kernel, BOUND_K_MAX)
        },
        |c| {
            random += check_bound_case(&mut tally, &c) as usize;
            Ok(random >= BOUND_TARGET)
        },
    )?;
    tally.require(random, BOUND_TARGET, "random instances with kernel distance ≥ 3");
    let (t, tp) = extended_tight_pair(3, BOUND_CHAIN_EXTENSION)?;
    let c = bound_case(t, tp, &cfg.kernel, 3)?;
    let tight_ok = check_bound_case(&mut tally, &c);
    tally.require(tight_ok as usize, 1, "extended tight pairs with known distance");
    Ok(tally.report(
        Suite::Bound,
        format!(
            "{random} random instances (n ≤ {BOUND_MAX_TAXA}, ≤ {BOUND_MAX_MOVES} moves) and one extended tight pair, kernel {} taxa",
            c.kernel_taxa
        ),
    ))
}

// ----------------------------------------------------------------- tight

pub const TIGHT_KS: std::ops::RangeInclusive<usize> = 3..=8;

fn tight_suite() -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let ks: Vec<usize> = TIGHT_KS.collect();
    let rows: Vec<(usize, PhyloTree, PhyloTree, Vec<(bool, String)>)> = ks
        .par_iter()
        .map(|&k| {
            let ti = tight_instance(k)?;
            let (t, tp) = (&ti.t, &ti.tp);
            let g = &ti.network.generator;
            let events = kernelize_with(t, tp, &KernelConfig::default())?.trace.len();
            let lower = mp_lower_bound(t, tp, &ti.character)?;
            let forest_ok = ti.forest.len() == k + 1 && is_agreement_forest(t, tp, &ti.forest.blocks)?;
            let mut checks = vec![
                (t.num_taxa() == 9 * k - 9, format!("{} taxa", t.num_taxa())),
                (events == 0, format!("{events} reduction events")),
                (lower >= k, format!("parsimony bound {lower}")),
                (forest_ok, format!("forest with {} blocks", ti.forest.len())),
                (
                    g.is_cubic() && g.sides.len() == 3 * (k - 1) && g.multi_edge_pairs() == 2,
                    "generator laws".to_string(),
                ),
            ];
            if k == 3 {
                let d = tbr_distance(t, tp, k)?;
                checks.push((d == Some(k), format!("oracle distance {d:?}")));
            }
            Ok((k, t.clone(), tp.clone(), checks))
        })
        .collect::<Result<_>>()?;
    for (k, t, tp, checks) in &rows {
        for (ok, what) in checks {
            tally.check(*ok, t, tp, || format!("k = {k}: {what}"));
        }
    }
    Ok(tally.report(Suite::Tight, format!("k = 3..=8, oracle at k = 3")))
}

// ------------------------------------------------------------------- cpt

pub const CPT_PAIRS: usize = 200;
pub const CPT_MAX_TAXA: usize = 9;
const CPT_FAMILIES_PER_PAIR: usize = 8;

/// Every CPT-eligible common chain of length ≥ 2, one orientation each,
/// longest first.
pub fn eligible_chains(t: &PhyloTree, tp: &PhyloTree) -> Result<Vec<Vec<Taxon>>> {
    let mut out = Vec::new();
    for n in (2..=t.num_taxa()).rev() {
        for c in common_chains(t, tp, n) {
            if c.first() < c.last() && cpt_eligible(t, tp, &c)? {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Maximal disjoint families built greedily, one per starting chain.
pub fn greedy_families(chains: &[Vec<Taxon>], limit: usize) -> Vec<Vec<Vec<Taxon>>> {
    let mut seen = BTreeSet::new();
    for start in 0..chains.len().min(limit) {
        let mut used: BTreeSet<&Taxon> = BTreeSet::new();
        let mut family = Vec::new();
        for c in chains[start..].iter().chain(&chains[..start]) {
            if c.iter().all(|x| !used.contains(x)) {
                used.extend(c.iter());
                family.push(c.clone());
            }
        }
        family.sort();
        seen.insert(family);
    }
    seen.into_iter().collect()
}

fn cpt_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let rows: Vec<(PhyloTree, PhyloTree, Vec<(Vec<Vec<Taxon>>, bool)>)> = (0..CPT_PAIRS as u64)
        .into_par_iter()
        .map(|i| {
            let n = 5 + (i % 5) as usize;
            let moves = 1 + (i % 3) as usize;
            let (t, tp) = random_instance(n, moves, sub_seed(cfg.seed, 3, i))?;
            let families = greedy_families(&eligible_chains(&t, &tp)?, CPT_FAMILIES_PER_PAIR);
            let results = families
                .into_iter()
                .map(|f| Ok((f.clone(), maf_preserving(&t, &tp, &f)?.is_some())))
                .collect::<Result<_>>()?;
            Ok((t, tp, results))
        })
        .collect::<Result<_>>()?;
    let mut families = 0;
    for (t, tp, results) in &rows {
        for (f, ok) in results {
            families += 1;
            tally.check(*ok, t, tp, || format!("no MAF preserves {f:?}"));
        }
    }
    Ok(tally.report(
        Suite::Cpt,
        format!("{CPT_PAIRS} pairs (n ≤ {CPT_MAX_TAXA}), {families} chain families"),
    ))
}

// ----------------------------------------------------------- interrupted

pub const INTERRUPTED_TARGET: usize = 50;
pub const INTERRUPTED_MAX_TAXA: usize = 10;
const INTERRUPTED_SEED_LIMIT: u64 = 2_000;

/// A pair with an interrupted 4-chain: a random tree with a 4-chain
/// (a, b, c, d), and a copy where one other leaf is moved onto the edge
/// between the parents of b and c, followed by up to one random move.
pub fn interrupted_instance(seed: u64) -> Result<Option<(PhyloTree, PhyloTree, Vec<Taxon>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(7..=INTERRUPTED_MAX_TAXA);
    let t = random_tree(&default_labels(n), &mut rng)?;
    let fours: Vec<Vec<Taxon>> = crate::chain::chains(&t, 4)
        .into_iter()
        .filter(|c| c[0] < c[3])
        .collect();
    let Some(chain) = fours.choose(&mut rng).cloned() else {
        return Ok(None);
    };
    let others: Vec<Taxon> = t.taxa().filter(|x| !chain.contains(x)).cloned().collect();
    let s = others.choose(&mut rng).expect("n ≥ 7 leaves taxa outside the chain");
    let (leaf, ps) = (t.leaf_of(s.as_str()), t.parent(s.as_str()));
    let cut = EdgeRef::new(leaf, ps);
    let target = EdgeRef::new(t.parent(chain[1].as_str()), t.parent(chain[2].as_str()));
    let (a1, a2) = if cut.endpoints().0 == leaf { (None, Some(target)) } else { (Some(target), None) };
    let mut tp = tbr_move(&t, cut, a1, a2)?;
    if rng.gen_bool(0.5) {
        tp = random_tbr(&tp, &mut rng)?;
    }
    Ok(Some((t, tp, chain)))
}

fn interrupted_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let mut instances = 0;
    search(
        INTERRUPTED_SEED_LIMIT,
        |i| {
            let Some((t, tp, chain)) = interrupted_instance(sub_seed(cfg.seed, 4, i))? else {
                return Ok(None);
            };
            let found = find_interrupted_4chains(&t, &tp)?;
            if !found.iter().any(|c| c.chain == chain) {
                return Ok(None);
            }
            let results = found
                .into_iter()
                .map(|c| Ok((maf_avoiding_edge(&t, &tp, c.interrupter)?.is_some(), c)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Some((t, tp, results)))
        },
        |item| {
            if let Some((t, tp, results)) = item {
                instances += 1;
                for (ok, c) in results {
                    tally.check(ok, &t, &tp, || {
                        format!("no MAF avoids interrupter {} of {:?}", c.interrupter, c.chain)
                    });
                }
            }
            Ok(instances >= INTERRUPTED_TARGET)
        },
    )?;
    tally.require(instances, INTERRUPTED_TARGET, "interrupted-chain instances");
    Ok(tally.report(
        Suite::Interrupted,
        format!("{instances} constructed instances (n ≤ {INTERRUPTED_MAX_TAXA})"),
    ))
}

// ----------------------------------------------------------- eligibility

pub const ELIGIBILITY_TARGET: usize = 500;
pub const ELIGIBILITY_MAX_TAXA: usize = 10;
const ELIGIBILITY_SEED_LIMIT: u64 = 5_000;

/// A random rooted binary tree on `items` as a Newick fragment.
fn rooted_fragment<R: Rng + ?Sized>(items: &[String], rng: &mut R) -> String {
    if items.len() == 1 {
        return items[0].clone();
    }
    let cut = rng.gen_range(1..items.len());
    format!("({},{})", rooted_fragment(&items[..cut], rng), rooted_fragment(&items[cut..], rng))
}

/// A random unrooted tree on at least three `items`, which may themselves be
/// Newick fragments.
fn unrooted<R: Rng + ?Sized>(mut items: Vec<String>, rng: &mut R) -> Result<PhyloTree> {
    items.shuffle(rng);
    let i = rng.gen_range(1..items.len() - 1);
    let j = rng.gen_range(i + 1..items.len());
    parse_newick(&format!(
        "({},{},{});",
        rooted_fragment(&items[..i], rng),
        rooted_fragment(&items[i..j], rng),
        rooted_fragment(&items[j..], rng)
    ))
}

/// Pairs for the eligibility suite: `kind` 0 is a random pair, 1 has the
/// Operation P shape for (a, b, c, d) = the first four labels, 2 has the
/// Reduction 10 shape.
pub fn eligibility_instance(kind: u64, seed: u64) -> Result<TreePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(6..=ELIGIBILITY_MAX_TAXA);
    if kind == 0 {
        let moves = rng.gen_range(1..=3);
        let (t, tp) = random_instance(n, moves, rng.gen())?;
        return TreePair::new(t, tp);
    }
    let labels: Vec<String> = default_labels(n).iter().map(|t| t.to_string()).collect();
    let (a, b, c, d) = (&labels[0], &labels[1], &labels[2], &labels[3]);
    let mut rest = labels[4..].to_vec();
    rest.shuffle(&mut rng);
    let (x, y) = if kind == 1 {
        let cut = rng.gen_range(1..rest.len());
        let x = parse_newick(&format!(
            "({},{a},({b},({c},({d},{}))));",
            rooted_fragment(&rest[..cut], &mut rng),
            rooted_fragment(&rest[cut..], &mut rng)
        ))?;
        let mut items = rest.clone();
        items.extend([format!("({a},{b})"), format!("({c},{d})")]);
        (x, unrooted(items, &mut rng)?)
    } else {
        let mut xi = rest.clone();
        xi.extend([format!("({a},{b})"), format!("({c},{d})")]);
        let mut yi = rest.clone();
        yi.extend([format!("({a},({b},{c}))"), d.clone()]);
        (unrooted(xi, &mut rng)?, unrooted(yi, &mut rng)?)
    };
    TreePair::new(x, y)
}

#[derive(Default)]
struct EligibilityCounts {
    tuples: usize,
    p_yes: usize,
    r10_yes: usize,
}

fn eligibility_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let mut counts = EligibilityCounts::default();
    type Row = (TreePair, Vec<(&'static str, Vec<Taxon>, bool, bool)>);
    search(
        ELIGIBILITY_SEED_LIMIT,
        |i| -> Result<Row> {
            let pair = eligibility_instance(i % 3, sub_seed(cfg.seed, 5, i))?;
            let mut out = Vec::new();
            for o in Orient::BOTH {
                let (x, y) = pair.oriented(o);
                for w in p_tuples(x, y) {
                    let s: Vec<&str> = w.iter().map(Taxon::as_str).collect();
                    let yes = algorithm1_eligible(x, y, &s)?.is_yes();
                    let sound = !yes || exact_p_eligible(x, y, &s)?.is_yes();
                    out.push(("P", w, yes, sound));
                }
                for w in r10_tuples(x, y) {
                    let s: Vec<&str> = w.iter().map(Taxon::as_str).collect();
                    let yes = algorithm2_eligible(x, y, &s)?.is_yes();
                    let sound = !yes || exact_r10_eligible(x, y, &s)?.is_yes();
                    out.push(("R10", w, yes, sound));
                }
            }
            Ok((pair, out))
        },
        |(pair, out)| {
            for (which, w, yes, sound) in out {
                counts.tuples += 1;
                if yes {
                    if which == "P" {
                        counts.p_yes += 1;
                    } else {
                        counts.r10_yes += 1;
                    }
                }
                tally.check(sound, &pair.t, &pair.tp, || {
                    format!("{which} YES on {w:?} not confirmed by MAF enumeration")
                });
            }
            Ok(counts.tuples >= ELIGIBILITY_TARGET)
        },
    )?;
    tally.require(counts.tuples, ELIGIBILITY_TARGET, "tuples");
    Ok(tally.report(
        Suite::Eligibility,
        format!(
            "{} tuples (n ≤ {ELIGIBILITY_MAX_TAXA}), {} P and {} R10 YES verdicts",
            counts.tuples, counts.p_yes, counts.r10_yes
        ),
    ))
}

// ----------------------------------------------------------- determinism

const DETERMINISM_RUNS: u64 = 8;

fn determinism_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    for i in 0..DETERMINISM_RUNS {
        let seed = sub_seed(cfg.seed, 6, i);
        let run = || -> Result<(PhyloTree, PhyloTree, String)> {
            let (t, tp) = random_instance(20, 4, seed)?;
            let json = kernelize_with(&t, &tp, &cfg.kernel)?.trace_file().to_json();
            Ok((t, tp, json))
        };
        let (t, tp, first) = run()?;
        let (_, _, second) = run()?;
        tally.check(first == second, &t, &tp, || "kernel traces differ".into());
    }
    for k in 3..=5 {
        let render = || -> Result<(PhyloTree, PhyloTree, String)> {
            let ti = tight_instance(k)?;
            let text = format!(
                "{}\n{}\n{}\n{:?}",
                ti.t.to_newick(),
                ti.tp.to_newick(),
                serde_json::to_string(&ti.character).expect("character serializes"),
                ti.forest
            );
            Ok((ti.t, ti.tp, text))
        };
        let (t, tp, first) = render()?;
        let (_, _, second) = render()?;
        tally.check(first == second, &t, &tp, || format!("tight instance k = {k} differs"));
    }
    Ok(tally.report(
        Suite::Determinism,
        format!("{DETERMINISM_RUNS} kernelizations and 3 tight instances, each run twice"),
    ))
}
