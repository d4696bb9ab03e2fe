//! Kernelization for exemplar sources.
//!
//! An adjacent pair `xy` of the source is *stable* when, in the target, every
//! `x` is followed by `y` and every `y` is preceded by `x`. Maximal runs of
//! stable pairs are always duplicated together by some optimal sequence, so
//! each run can be replaced by one fresh symbol. If the distance is at most
//! `k` there are at most `2k + 1` runs and the reduced target has at most
//! `(2k + 1) * 2^k` symbols.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::{decide_td, SearchResult, Verdict};
use crate::strings::{feasibility_precheck, ContractionStep, Symbol, TokenString};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum KernelError {
    #[error("source string is not exemplar")]
    NotExemplar,
    #[error("target uses symbol {0:?} absent from the source")]
    ForeignSymbol(Symbol),
    #[error("target cannot be tiled by stable blocks at position {position}")]
    TokenizationFailure { position: usize },
}

/// Half-open interval `[start, end)` of source positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub start: usize,
    pub end: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Decomposition of the source into maximal stable substrings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StablePartition {
    pub blocks: Vec<Block>,
}

impl StablePartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

fn check_instance(source: &TokenString, target: &TokenString) -> Result<(), KernelError> {
    if !source.is_exemplar() {
        return Err(KernelError::NotExemplar);
    }
    let alphabet = source.alphabet();
    if let Some(foreign) = target.iter().find(|s| !alphabet.contains(s)) {
        return Err(KernelError::ForeignSymbol(foreign));
    }
    Ok(())
}

/// Positions `i` such that `source[i] source[i+1]` is stable in `target`.
pub fn stable_pairs(
    source: &TokenString,
    target: &TokenString,
) -> Result<BTreeSet<usize>, KernelError> {
    check_instance(source, target)?;
    let src = source.tokens();
    let position: HashMap<Symbol, usize> = src.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    // broken[i]: the pair at i is witnessed unstable somewhere in the target.
    let mut broken = vec![false; src.len().saturating_sub(1)];
    let tgt = target.tokens();
    for (j, &sym) in tgt.iter().enumerate() {
        let i = position[&sym];
        // x = sym must be followed by src[i + 1]
        if i + 1 < src.len() && tgt.get(j + 1) != Some(&src[i + 1]) {
            broken[i] = true;
        }
        // y = sym must be preceded by src[i - 1]
        if i > 0 && (j == 0 || tgt[j - 1] != src[i - 1]) {
            broken[i - 1] = true;
        }
    }
    Ok(broken
        .iter()
        .enumerate()
        .filter(|(_, &b)| !b)
        .map(|(i, _)| i)
        .collect())
}

pub fn maximal_stable_partition(
    source: &TokenString,
    target: &TokenString,
) -> Result<StablePartition, KernelError> {
    let stable = stable_pairs(source, target)?;
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 0..source.len() {
        if !stable.contains(&i) {
            blocks.push(Block { start, end: i + 1 });
            start = i + 1;
        }
    }
    Ok(StablePartition { blocks })
}

/// The reduced instance and the bookkeeping needed to map it back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kernel {
    pub s_prime: TokenString,
    pub t_prime: TokenString,
    pub partition: StablePartition,
    /// Fresh symbol `Symbol(b)` stands for block `b`; `provenance[b]` is the
    /// source token run it replaces.
    pub provenance: Vec<TokenString>,
}

impl Kernel {
    /// Fresh symbol assigned to block `index`. Kernel symbols are local to
    /// the kernel and numbered densely from zero.
    pub fn block_symbol(index: usize) -> Symbol {
        Symbol(index as u32)
    }

    /// Replaces every kernel symbol by its original token run.
    pub fn expand(&self, s: &TokenString) -> TokenString {
        s.iter()
            .flat_map(|sym| self.provenance[sym.index()].iter())
            .collect()
    }

    /// Maps a contraction witness on `t_prime` to one on the original target.
    pub fn lift_steps(&self, steps: &[ContractionStep]) -> Vec<ContractionStep> {
        let mut current: Vec<Symbol> = self.t_prime.tokens().to_vec();
        let mut lifted = Vec::with_capacity(steps.len());
        for step in steps {
            let width = |range: &[Symbol]| -> usize {
                range.iter().map(|s| self.provenance[s.index()].len()).sum()
            };
            let start = width(&current[..step.start]);
            let half_len = width(&current[step.start..step.start + step.half_len]);
            lifted.push(ContractionStep::new(start, half_len));
            current.drain(step.start + step.half_len..step.start + 2 * step.half_len);
        }
        lifted
    }
}

pub fn kernelize(source: &TokenString, target: &TokenString) -> Result<Kernel, KernelError> {
    let partition = maximal_stable_partition(source, target)?;
    let src = source.tokens();

    let mut block_of = HashMap::new();
    let mut provenance = Vec::with_capacity(partition.len());
    for (b, block) in partition.blocks.iter().enumerate() {
        for &sym in &src[block.start..block.end] {
            block_of.insert(sym, b);
        }
        provenance.push(TokenString::new(src[block.start..block.end].to_vec()));
    }

    let tgt = target.tokens();
    let mut t_prime = Vec::new();
    let mut pos = 0;
    while pos < tgt.len() {
        let b = block_of[&tgt[pos]];
        let run = provenance[b].tokens();
        if tgt.len() - pos < run.len() || &tgt[pos..pos + run.len()] != run {
            return Err(KernelError::TokenizationFailure { position: pos });
        }
        t_prime.push(Kernel::block_symbol(b));
        pos += run.len();
    }

    Ok(Kernel {
        s_prime: (0..partition.len()).map(Kernel::block_symbol).collect(),
        t_prime: TokenString::new(t_prime),
        partition,
        provenance,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSizes {
    pub s_prime: usize,
    pub t_prime: usize,
    pub max_s_prime: usize,
    pub max_t_prime: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FptRejection {
    /// A cheap necessary condition already fails.
    Precheck,
    /// More than `2k + 1` maximal stable blocks.
    TooManyBlocks,
    /// Reduced target longer than `(2k + 1) * 2^k`.
    TargetTooLong,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FptOutcome {
    pub result: SearchResult,
    pub sizes: Option<KernelSizes>,
    pub rejected: Option<FptRejection>,
    /// Witness on the original target, lifted from the kernel witness.
    pub lifted: Option<Vec<ContractionStep>>,
}

/// `(2k + 1, (2k + 1) * 2^k)`, saturating.
pub fn kernel_bounds(k: usize) -> (usize, usize) {
    let blocks = k.saturating_mul(2).saturating_add(1);
    let factor = u32::try_from(k)
        .ok()
        .and_then(|k| 2usize.checked_pow(k))
        .unwrap_or(usize::MAX);
    (blocks, blocks.saturating_mul(factor))
}

/// Decides `dist(source, target) <= k` on the kernel.
pub fn fpt_solve(
    source: &TokenString,
    target: &TokenString,
    k: usize,
) -> Result<FptOutcome, KernelError> {
    if !source.is_exemplar() {
        return Err(KernelError::NotExemplar);
    }
    let rejected = |sizes, why| FptOutcome {
        result: SearchResult {
            verdict: Verdict::NotWithinBound,
            explored: 0,
        },
        sizes,
        rejected: Some(why),
        lifted: None,
    };
    if !feasibility_precheck(source, target).is_feasible() {
        return Ok(rejected(None, FptRejection::Precheck));
    }

    let kernel = kernelize(source, target)?;
    let (max_s_prime, max_t_prime) = kernel_bounds(k);
    let sizes = KernelSizes {
        s_prime: kernel.s_prime.len(),
        t_prime: kernel.t_prime.len(),
        max_s_prime,
        max_t_prime,
    };
    if sizes.s_prime > max_s_prime {
        return Ok(rejected(Some(sizes), FptRejection::TooManyBlocks));
    }
    if sizes.t_prime > max_t_prime {
        return Ok(rejected(Some(sizes), FptRejection::TargetTooLong));
    }

    let result = decide_td(&kernel.s_prime, &kernel.t_prime, k);
    let lifted = result.steps().map(|steps| kernel.lift_steps(&steps));
    Ok(FptOutcome {
        result,
        sizes: Some(sizes),
        rejected: None,
        lifted,
    })
}
