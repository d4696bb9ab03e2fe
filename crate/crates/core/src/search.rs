//! Exact bounded-depth contraction search from the target toward the source.
//!
//! The search contracts squares of `T` depth-first under an iteratively
//! increasing budget, so the first witness found has minimum length. A
//! failure memo keyed by string content records the largest remaining budget
//! already proven insufficient for that string, so repeated states are
//! expanded once per budget level.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::strings::{
    apply_contraction, enumerate_squares, feasibility_precheck, ContractionStep, Feasibility,
    InfeasibleReason, Symbol, TokenString,
};

/// One contraction of a witness together with the string it applies to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessStep {
    pub step: ContractionStep,
    pub before: TokenString,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    Reached {
        depth: usize,
        witness: Vec<WitnessStep>,
    },
    NotWithinBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub verdict: Verdict,
    /// Number of search nodes expanded.
    pub explored: u64,
}

impl SearchResult {
    pub fn is_reached(&self) -> bool {
        matches!(self.verdict, Verdict::Reached { .. })
    }

    pub fn depth(&self) -> Option<usize> {
        match &self.verdict {
            Verdict::Reached { depth, .. } => Some(*depth),
            Verdict::NotWithinBound => None,
        }
    }

    /// The bare contraction steps of the witness, if any.
    pub fn steps(&self) -> Option<Vec<ContractionStep>> {
        match &self.verdict {
            Verdict::Reached { witness, .. } => Some(witness.iter().map(|w| w.step).collect()),
            Verdict::NotWithinBound => None,
        }
    }
}

/// Why a distance is known to be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "certificate", content = "reason", rename_all = "kebab-case")]
pub enum Unreachability {
    /// A necessary condition of reachability fails.
    Precheck(InfeasibleReason),
    /// Search exhausted `|T| - |S|` contractions; every contraction removes
    /// at least one token so no longer sequence exists.
    LengthBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistanceOutcome {
    Distance {
        distance: usize,
        witness: Vec<WitnessStep>,
    },
    ExceedsBound {
        max_k: usize,
    },
    Unreachable {
        #[serde(flatten)]
        why: Unreachability,
    },
}

impl DistanceOutcome {
    pub fn distance(&self) -> Option<usize> {
        match self {
            DistanceOutcome::Distance { distance, .. } => Some(*distance),
            _ => None,
        }
    }
}

struct Searcher<'a> {
    source: &'a [Symbol],
    /// string -> largest remaining budget proven insufficient
    failed: HashMap<Vec<Symbol>, usize>,
    path: Vec<WitnessStep>,
    explored: u64,
}

impl<'a> Searcher<'a> {
    fn new(source: &'a TokenString) -> Self {
        Self {
            source: source.tokens(),
            failed: HashMap::new(),
            path: Vec::new(),
            explored: 0,
        }
    }

    /// Lower-bound prune: a contraction at best halves the length.
    fn hopeless(&self, len: usize, remaining: usize) -> bool {
        let src = self.source.len();
        if len < src {
            return true;
        }
        match u32::try_from(remaining)
            .ok()
            .and_then(|r| 2usize.checked_pow(r))
            .and_then(|f| f.checked_mul(src))
        {
            Some(reach) => len > reach,
            None => false,
        }
    }

    fn dfs(&mut self, current: &TokenString, remaining: usize) -> bool {
        if current.tokens() == self.source {
            return true;
        }
        if remaining == 0 || current.len() <= self.source.len() {
            return false;
        }
        if self.hopeless(current.len(), remaining) {
            return false;
        }
        if self
            .failed
            .get(current.tokens())
            .is_some_and(|&r| r >= remaining)
        {
            return false;
        }
        self.explored += 1;
        for step in enumerate_squares(current) {
            let next = apply_contraction(current, step).expect("enumerated square");
            self.path.push(WitnessStep {
                step,
                before: current.clone(),
            });
            if self.dfs(&next, remaining - 1) {
                return true;
            }
            self.path.pop();
        }
        self.failed.insert(current.tokens().to_vec(), remaining);
        false
    }

    /// Iterative deepening up to `max_k`; returns the first (and hence
    /// minimum) depth at which a witness exists.
    fn deepen(&mut self, target: &TokenString, max_k: usize) -> Option<usize> {
        for limit in 0..=max_k {
            self.path.clear();
            if self.dfs(target, limit) {
                return Some(limit);
            }
            // Nothing to gain past the length bound.
            if limit >= target.len().saturating_sub(self.source.len()) {
                return None;
            }
        }
        None
    }
}

/// Decides whether `target` contracts to `source` within `k` steps. A
/// `Reached` verdict always carries a minimum-length witness.
pub fn decide_td(source: &TokenString, target: &TokenString, k: usize) -> SearchResult {
    if !feasibility_precheck(source, target).is_feasible() {
        return SearchResult {
            verdict: Verdict::NotWithinBound,
            explored: 0,
        };
    }
    let mut searcher = Searcher::new(source);
    let verdict = match searcher.deepen(target, k) {
        Some(depth) => Verdict::Reached {
            depth,
            witness: std::mem::take(&mut searcher.path),
        },
        None => Verdict::NotWithinBound,
    };
    SearchResult {
        verdict,
        explored: searcher.explored,
    }
}

/// Minimum number of duplications turning `source` into `target`, searched
/// up to `max_k`.
pub fn td_distance(source: &TokenString, target: &TokenString, max_k: usize) -> DistanceOutcome {
    if let Feasibility::Infeasible(reason) = feasibility_precheck(source, target) {
        return DistanceOutcome::Unreachable {
            why: Unreachability::Precheck(reason),
        };
    }
    let mut searcher = Searcher::new(source);
    match searcher.deepen(target, max_k) {
        Some(distance) => DistanceOutcome::Distance {
            distance,
            witness: std::mem::take(&mut searcher.path),
        },
        None if max_k >= target.len() - source.len() => DistanceOutcome::Unreachable {
            why: Unreachability::LengthBound,
        },
        None => DistanceOutcome::ExceedsBound { max_k },
    }
}

/// Replays `steps` from `target` and reports whether the result is `source`.
pub fn replays_to(target: &TokenString, steps: &[ContractionStep], source: &TokenString) -> bool {
    let mut cur = target.clone();
    for &step in steps {
        match apply_contraction(&cur, step) {
            Ok(next) => cur = next,
            Err(_) => return false,
        }
    }
    &cur == source
}
