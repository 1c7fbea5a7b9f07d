//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Witnesses produced by the library are re-checked with the
//! helpers in `common`, which only use the tree API.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use common::{is_agreement_forest, parsimony, uses_edge};
use tbrkern::chain::{common_chains, cpt_eligible};
use tbrkern::maf::{enumerate_mafs, exact_tbr_via_moves, maf_avoiding_edge, maf_preserving, tbr_ball};
use tbrkern::random::default_labels;
use tbrkern::reduce::eligibility::{algorithm1_eligible, algorithm2_eligible};
use tbrkern::reduce::new::{find_interrupted_4chains, p_tuples, r10_tuples};
use tbrkern::tbr::all_trees;
use tbrkern::tight::tight_instance;
use tbrkern::verify::{eligibility_instance, interrupted_instance, rule_applications, VerifyConfig};
use tbrkern::{
    exact_tbr_distance, kernel_bound, kernelize, mp_lower_bound, random_instance, tbr_distance,
    AgreementForest, Orient, PhyloTree, Taxon,
};

type Outcome = (bool, String);

fn blocks(f: &AgreementForest) -> Vec<BTreeSet<String>> {
    f.blocks
        .iter()
        .map(|b| b.iter().map(|t| t.to_string()).collect())
        .collect()
}

/// A library forest is a certified optimum at distance `d` when it checks
/// out locally and has `d + 1` blocks.
fn certified(t: &PhyloTree, tp: &PhyloTree, f: &AgreementForest, d: usize) -> bool {
    f.len() == d + 1 && is_agreement_forest(t, tp, &blocks(f))
}

fn mix(stream: u64, i: u64) -> u64 {
    (stream << 32) ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn oracle_sweep() -> Outcome {
    let start = Instant::now();
    let labels = default_labels(6);
    let mut pairs = 0;
    let mut bad = 0;
    for n in [5, 6] {
        let trees = all_trees(&labels[..n]).unwrap();
        let rows: Vec<(usize, usize)> = trees
            .par_iter()
            .map(|t| {
                let ball = tbr_ball(t, 2);
                let mut bad = 0;
                for tp in &trees {
                    let cut = tbr_distance(t, tp, 2).unwrap();
                    if cut != ball.get(&tp.to_newick()).copied() {
                        bad += 1;
                    }
                }
                (trees.len(), bad)
            })
            .collect();
        pairs += rows.iter().map(|r| r.0).sum::<usize>();
        bad += rows.iter().map(|r| r.1).sum::<usize>();
        if n == 5 {
            // The ball lookup above is the move oracle; exercise its public
            // entry point directly on the small sweep.
            for t in &trees {
                for tp in &trees {
                    if exact_tbr_via_moves(t, tp, 2).unwrap() != tbr_distance(t, tp, 2).unwrap() {
                        bad += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    (
        bad == 0 && elapsed < Duration::from_secs(300),
        format!("{pairs} ordered pairs on 5 and 6 taxa, {bad} disagreements, {:.1?}", elapsed),
    )
}

fn rule_deltas() -> Outcome {
    let apps = rule_applications(&VerifyConfig::default()).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for (rule, list) in &apps {
        let good: usize = list
            .par_iter()
            .map(|(before, after, ev)| {
                if before.num_taxa() > 14 {
                    return 0;
                }
                let (Some(c0), Some(c1)) = (
                    exact_tbr_distance(&before.t, &before.tp, 8).unwrap(),
                    exact_tbr_distance(&after.t, &after.tp, 8).unwrap(),
                ) else {
                    return 0;
                };
                let mut pass = c0.k == c1.k + ev.delta_k
                    && certified(&before.t, &before.tp, &c0.forest, c0.k)
                    && certified(&after.t, &after.tp, &c1.forest, c1.k);
                if before.num_taxa() <= 8 && c0.k <= 3 {
                    pass &= exact_tbr_via_moves(&before.t, &before.tp, c0.k).unwrap() == Some(c0.k);
                }
                pass as usize
            })
            .sum();
        ok &= list.len() >= 10 && good == list.len();
        lines.push(format!("{rule} {good}/{}", list.len()));
    }
    (ok, lines.join(", "))
}

fn kernel_bound_check() -> Outcome {
    let mut counted = 0;
    let mut violations = 0;
    let mut accounting = 0;
    let mut i = 0u64;
    while counted < 200 && i < 5_000 {
        let batch: Vec<Option<(bool, bool)>> = (i..i + 64)
            .into_par_iter()
            .map(|j| {
                let n = 12 + (j % 9) as usize;
                let moves = 3 + (j % 2) as usize;
                let (t, tp) = random_instance(n, moves, mix(3, j)).unwrap();
                let r = kernelize(&t, &tp).unwrap();
                let k = tbr_distance(r.t(), r.tp(), 5).unwrap()?;
                if k < 3 {
                    return None;
                }
                let within = r.kernel_taxa <= kernel_bound(k).unwrap();
                let adds_up = tbr_distance(&t, &tp, 5).unwrap() == Some(k + r.offset);
                Some((within, adds_up))
            })
            .collect();
        for (within, adds_up) in batch.into_iter().flatten() {
            if counted < 200 {
                counted += 1;
                violations += !within as usize;
                accounting += !adds_up as usize;
            }
        }
        i += 64;
    }
    (
        counted >= 200 && violations == 0 && accounting == 0,
        format!("{counted} instances with kernel distance ≥ 3, {violations} bound violations, {accounting} offset mismatches"),
    )
}

fn tightness() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for k in 3..=8 {
        let ti = tight_instance(k).unwrap();
        let events = kernelize(&ti.t, &ti.tp).unwrap().trace.len();
        let lower = mp_lower_bound(&ti.t, &ti.tp, &ti.character).unwrap();
        let f: BTreeMap<String, u8> = ti.character.assignment.iter().map(|(t, &s)| (t.to_string(), s)).collect();
        let local = parsimony(&ti.t, &f).abs_diff(parsimony(&ti.tp, &f));
        let forest_ok = ti.forest.len() == k + 1 && is_agreement_forest(&ti.t, &ti.tp, &blocks(&ti.forest));
        let mut good = ti.t.num_taxa() == 9 * k - 9 && events == 0 && lower >= k && local == lower && forest_ok;
        if k == 3 {
            let start = Instant::now();
            let d = tbr_distance(&ti.t, &ti.tp, 3).unwrap();
            let elapsed = start.elapsed();
            good &= d == Some(3) && elapsed < Duration::from_secs(1);
            notes.push(format!("k=3 oracle {d:?} in {elapsed:.1?}"));
        }
        ok &= good;
        notes.push(format!("k={k}: {} taxa, bound {lower}", ti.t.num_taxa()));
    }
    (ok, notes.join(", "))
}

/// Greedy maximal disjoint families, one per starting chain.
fn families(chains: &[Vec<Taxon>]) -> BTreeSet<Vec<Vec<Taxon>>> {
    let mut out = BTreeSet::new();
    for start in 0..chains.len() {
        let mut used = BTreeSet::new();
        let mut family = Vec::new();
        for c in chains.iter().cycle().skip(start).take(chains.len()) {
            if c.iter().all(|x| !used.contains(x)) {
                used.extend(c.iter().cloned());
                family.push(c.clone());
            }
        }
        family.sort();
        out.insert(family);
    }
    out
}

fn cpt_property() -> Outcome {
    let rows: Vec<(usize, usize)> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let n = 5 + (i % 5) as usize;
            let (t, tp) = random_instance(n, 1 + (i % 3) as usize, mix(5, i)).unwrap();
            let d = tbr_distance(&t, &tp, n).unwrap().unwrap();
            let mut chains = Vec::new();
            for len in 2..=n {
                for c in common_chains(&t, &tp, len) {
                    if c.first() < c.last() && cpt_eligible(&t, &tp, &c).unwrap() {
                        chains.push(c);
                    }
                }
            }
            let fams = families(&chains);
            let good = fams
                .iter()
                .filter(|fam| {
                    let Some(f) = maf_preserving(&t, &tp, fam).unwrap() else { return false };
                    certified(&t, &tp, &f, d)
                        && fam.iter().all(|c| f.blocks.iter().any(|b| c.iter().all(|x| b.contains(x))))
                })
                .count();
            (fams.len(), good)
        })
        .collect();
    let total: usize = rows.iter().map(|r| r.0).sum();
    let good: usize = rows.iter().map(|r| r.1).sum();
    (total == good, format!("200 pairs, {good}/{total} chain families preserved by a certified MAF"))
}

fn interrupted_property() -> Outcome {
    let mut instances = 0;
    let mut checked = 0;
    let mut good = 0;
    let mut seed = 0;
    while instances < 50 && seed < 2_000 {
        seed += 1;
        let Some((t, tp, chain)) = interrupted_instance(mix(6, seed)).unwrap() else { continue };
        let found = find_interrupted_4chains(&t, &tp).unwrap();
        if !found.iter().any(|c| c.chain == chain) {
            continue;
        }
        instances += 1;
        let d = tbr_distance(&t, &tp, t.num_taxa()).unwrap().unwrap();
        for c in found {
            checked += 1;
            let (u, v) = c.interrupter.endpoints();
            if let Some(f) = maf_avoiding_edge(&t, &tp, c.interrupter).unwrap() {
                good += (certified(&t, &tp, &f, d) && !uses_edge(&tp, &blocks(&f), u, v)) as usize;
            }
        }
    }
    (
        instances >= 50 && good == checked,
        format!("{instances} instances, {good}/{checked} interrupters avoided by a certified MAF"),
    )
}

fn eligibility_soundness() -> Outcome {
    let mut tuples = 0;
    let mut yes = 0;
    let mut unsound = 0;
    let mut i = 0u64;
    while tuples < 500 && i < 5_000 {
        let pair = eligibility_instance(i % 3, mix(7, i)).unwrap();
        i += 1;
        let mut verdicts = Vec::new();
        for o in Orient::BOTH {
            let (x, y) = pair.oriented(o);
            for w in p_tuples(x, y) {
                let s: Vec<&str> = w.iter().map(Taxon::as_str).collect();
                verdicts.push((true, o, w.clone(), algorithm1_eligible(x, y, &s).unwrap().is_yes()));
            }
            for w in r10_tuples(x, y) {
                let s: Vec<&str> = w.iter().map(Taxon::as_str).collect();
                verdicts.push((false, o, w.clone(), algorithm2_eligible(x, y, &s).unwrap().is_yes()));
            }
        }
        tuples += verdicts.len();
        if verdicts.iter().all(|v| !v.3) {
            continue;
        }
        let d = tbr_distance(&pair.t, &pair.tp, pair.num_taxa()).unwrap().unwrap();
        let mafs: Vec<Vec<BTreeSet<String>>> = enumerate_mafs(&pair.t, &pair.tp)
            .unwrap()
            .iter()
            .filter(|f| certified(&pair.t, &pair.tp, f, d))
            .map(blocks)
            .collect();
        for (is_p, _, w, v) in verdicts {
            if !v {
                continue;
            }
            yes += 1;
            let w: Vec<String> = w.iter().map(|t| t.to_string()).collect();
            let together = |f: &Vec<BTreeSet<String>>, xs: &[&String]| f.iter().any(|b| xs.iter().all(|x| b.contains(*x)));
            let confirmed = mafs.iter().any(|f| {
                if is_p {
                    together(f, &[&w[0], &w[1]]) && together(f, &[&w[2], &w[3]]) && !together(f, &[&w[0], &w[2]])
                } else {
                    f.iter().any(|b| b.len() == 1 && b.contains(&w[2]))
                }
            });
            unsound += !confirmed as usize;
        }
    }
    (
        tuples >= 500 && unsound == 0,
        format!("{tuples} tuples, {yes} YES verdicts, {unsound} unconfirmed"),
    )
}

fn determinism() -> Outcome {
    let run = || -> Vec<String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        pool.install(|| {
            let mut out: Vec<String> = (0..10u64)
                .into_par_iter()
                .map(|i| {
                    let (t, tp) = random_instance(14 + (i % 7) as usize, 4, mix(8, i)).unwrap();
                    kernelize(&t, &tp).unwrap().trace_file().to_json()
                })
                .collect();
            for k in 3..=8 {
                let ti = tight_instance(k).unwrap();
                out.push(format!(
                    "{}\n{}\n{:?}\n{:?}",
                    ti.t.to_newick(),
                    ti.tp.to_newick(),
                    ti.character.assignment,
                    ti.forest
                ));
            }
            out
        })
    };
    let (a, b) = (run(), run());
    let same = a.iter().zip(&b).filter(|(x, y)| x == y).count();
    (a == b, format!("{same}/{} outputs identical across two 4-thread runs", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle self-consistency", oracle_sweep),
        ("per-rule distance deltas", rule_deltas),
        ("kernel bound", kernel_bound_check),
        ("tight family", tightness),
        ("chain preservation", cpt_property),
        ("interrupted chains", interrupted_property),
        ("eligibility soundness", eligibility_soundness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        failed += !ok as usize;
        println!("criterion {}: {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
