//! Reduction rules.
//!
//! Every rule comes in two parts: a detector that scans candidate witnesses
//! in canonical order, and an `apply_*` function that re-checks the rule's
//! preconditions for one explicit witness and performs the rewrite. Trace
//! replay drives the `apply_*` functions directly.

pub mod classic;
pub mod eligibility;
pub mod new;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pair::{Orient, TreePair};
use crate::tree::Taxon;

pub use eligibility::{Eligibility, EligibilityMode, Verdict};

/// Rule identifiers, in driver order. `OpP` never fires on its own; it is
/// recorded for standalone applications of Operation P.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    OpP,
}

impl Rule {
    /// The ten driver rules in firing order.
    pub const ORDERED: [Rule; 10] = [
        Rule::R1,
        Rule::R2,
        Rule::R3,
        Rule::R4,
        Rule::R5,
        Rule::R6,
        Rule::R7,
        Rule::R8,
        Rule::R9,
        Rule::R10,
    ];

    /// Parameter decrease caused by one application.
    pub fn delta_k(self) -> usize {
        match self {
            Rule::R3 | Rule::R4 | Rule::R5 | Rule::R10 => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        let upper = s.trim().to_ascii_uppercase();
        Rule::ORDERED
            .iter()
            .chain(std::iter::once(&Rule::OpP))
            .copied()
            .find(|r| r.to_string().to_ascii_uppercase() == upper)
            .ok_or_else(|| Error::Precondition(format!("unknown rule `{s}`")))
    }
}

/// One firing of a rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionEvent {
    pub rule: Rule,
    /// Which tree played the role of T.
    pub orient: Orient,
    pub witness: Vec<Taxon>,
    pub delta_k: usize,
    /// Net number of taxa removed.
    pub taxa_removed: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    pub description: String,
}

/// Settings shared by the reductions and the driver.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub eligibility: EligibilityMode,
    /// Rules the driver must not fire. Used for fault injection in the
    /// verification suites.
    #[serde(default)]
    pub skip: Vec<Rule>,
}

impl KernelConfig {
    pub fn exact(cap: usize) -> Self {
        KernelConfig {
            eligibility: EligibilityMode::Exact { cap },
            skip: Vec::new(),
        }
    }
}

pub type Applied = (TreePair, ReductionEvent);

/// Detects and applies `rule` once.
pub fn reduce(rule: Rule, pair: &TreePair, cfg: &KernelConfig) -> Result<Option<Applied>> {
    match rule {
        Rule::R1 => classic::reduce1_subtree(pair),
        Rule::R2 => classic::reduce2_chain(pair),
        Rule::R3 => classic::reduce3(pair),
        Rule::R4 => classic::reduce4(pair),
        Rule::R5 => classic::reduce5(pair),
        Rule::R6 => classic::reduce6(pair),
        Rule::R7 => classic::reduce7(pair),
        Rule::R8 => new::reduce8(pair),
        Rule::R9 => new::reduce9(pair, cfg),
        Rule::R10 => new::reduce10(pair, cfg),
        Rule::OpP => Ok(None),
    }
}

/// Re-applies a recorded event to the state it was recorded on. Fails if the
/// witness no longer satisfies the rule's preconditions.
pub fn apply_event(pair: &TreePair, ev: &ReductionEvent, cfg: &KernelConfig) -> Result<Applied> {
    let w: Vec<&str> = ev.witness.iter().map(Taxon::as_str).collect();
    let applied = match ev.rule {
        Rule::R1 => classic::apply_r1(pair, &w)?,
        Rule::R2 => classic::apply_r2(pair, &w)?,
        Rule::R3 => classic::apply_r3(pair, ev.orient, &w)?,
        Rule::R4 => classic::apply_r4(pair, ev.orient, &w)?,
        Rule::R5 => classic::apply_r5(pair, ev.orient, &w)?,
        Rule::R6 => classic::apply_r6(pair, ev.orient, &w)?,
        Rule::R7 => classic::apply_r7(pair, ev.orient, &w)?,
        Rule::R8 => new::apply_r8(pair, ev.orient, &w)?,
        Rule::R9 => new::apply_r9(pair, ev.orient, &w, ev.pattern.as_deref(), cfg)?,
        Rule::R10 => new::apply_r10(pair, ev.orient, &w, cfg)?,
        Rule::OpP => new::apply_op_p(pair, ev.orient, &w, cfg)?,
    };
    applied.ok_or_else(|| {
        Error::Invariant(format!(
            "recorded {} witness {:?} does not re-validate",
            ev.rule, ev.witness
        ))
    })
}

pub(crate) fn to_taxa(w: &[&str]) -> Vec<Taxon> {
    w.iter().map(|s| Taxon::new(s)).collect()
}

pub(crate) fn all_distinct(w: &[&str]) -> bool {
    let mut v = w.to_vec();
    v.sort_unstable();
    v.windows(2).all(|p| p[0] != p[1])
}
