//! Token strings, tandem duplications and contractions.
//!
//! Strings are sequences of interned [`Symbol`]s rather than bytes, so gadget
//! alphabets with thousands of distinct characters are cheap to represent.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense identifier of a token name inside a [`SymbolTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bijection between printable token names and dense symbol ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
    ids: HashMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, allocating the next dense id on first use.
    pub fn intern(&mut self, name: &str) -> Symbol {
        if let Some(&sym) = self.ids.get(name) {
            return sym;
        }
        let sym = Symbol(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), sym);
        sym
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, sym: Symbol) -> Option<&str> {
        self.names.get(sym.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Renders `s` as whitespace-separated token names.
    pub fn render(&self, s: &TokenString) -> String {
        s.iter()
            .map(|sym| self.name(sym).unwrap_or("?"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Interns every whitespace-separated token of `text`.
    pub fn parse(&mut self, text: &str) -> TokenString {
        TokenString::new(text.split_whitespace().map(|t| self.intern(t)).collect())
    }
}

/// A string over interned symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenString {
    tokens: Vec<Symbol>,
}

impl TokenString {
    pub fn new(tokens: Vec<Symbol>) -> Self {
        Self { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Symbol] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<Symbol> {
        self.tokens
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.tokens.iter().copied()
    }

    pub fn first(&self) -> Option<Symbol> {
        self.tokens.first().copied()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.tokens.last().copied()
    }

    /// The set of symbols occurring in the string.
    pub fn alphabet(&self) -> HashSet<Symbol> {
        self.tokens.iter().copied().collect()
    }

    /// True when no symbol occurs twice.
    pub fn is_exemplar(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.tokens.len());
        self.tokens.iter().all(|s| seen.insert(*s))
    }

    pub fn is_subsequence_of(&self, other: &TokenString) -> bool {
        let mut it = other.tokens.iter();
        self.tokens.iter().all(|s| it.any(|o| o == s))
    }

    /// Doubles every character: `x1 x2 .. xl` becomes `x1 x1 x2 x2 .. xl xl`.
    pub fn doubled(&self) -> TokenString {
        TokenString::new(self.tokens.iter().flat_map(|&s| [s, s]).collect())
    }
}

impl From<Vec<Symbol>> for TokenString {
    fn from(tokens: Vec<Symbol>) -> Self {
        Self::new(tokens)
    }
}

impl FromIterator<Symbol> for TokenString {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Locator of a square `XX` (for contractions) or of the copied block `X`
/// (for duplications): `X` starts at `start` and spans `half_len` tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContractionStep {
    pub start: usize,
    pub half_len: usize,
}

impl ContractionStep {
    pub fn new(start: usize, half_len: usize) -> Self {
        Self { start, half_len }
    }

    /// True when `s[start..start+h) == s[start+h..start+2h)`.
    pub fn is_square_in(&self, s: &TokenString) -> bool {
        let h = self.half_len;
        h > 0
            && h.checked_mul(2)
                .and_then(|w| self.start.checked_add(w))
                .is_some_and(|end| end <= s.len())
            && s.tokens[self.start..self.start + h] == s.tokens[self.start + h..self.start + 2 * h]
    }
}

impl fmt::Display for ContractionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.start, self.half_len)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum StepError {
    #[error("step ({start}, {half_len}) exceeds string of length {len}")]
    OutOfBounds {
        start: usize,
        half_len: usize,
        len: usize,
    },
    #[error("step ({start}, {half_len}) does not locate a square")]
    NotASquare { start: usize, half_len: usize },
    #[error("step has zero length")]
    EmptyStep,
}

/// Copies `s[start..start+half_len)` and inserts the copy right after it.
pub fn apply_duplication(s: &TokenString, step: ContractionStep) -> Result<TokenString, StepError> {
    let ContractionStep { start, half_len } = step;
    if half_len == 0 {
        return Err(StepError::EmptyStep);
    }
    let end = start
        .checked_add(half_len)
        .filter(|&e| e <= s.len())
        .ok_or(StepError::OutOfBounds {
            start,
            half_len,
            len: s.len(),
        })?;
    let mut out = Vec::with_capacity(s.len() + half_len);
    out.extend_from_slice(&s.tokens[..end]);
    out.extend_from_slice(&s.tokens[start..]);
    Ok(TokenString::new(out))
}

/// Deletes the right half of the square located by `step`.
pub fn apply_contraction(s: &TokenString, step: ContractionStep) -> Result<TokenString, StepError> {
    let ContractionStep { start, half_len } = step;
    if half_len == 0 {
        return Err(StepError::EmptyStep);
    }
    let in_bounds = half_len
        .checked_mul(2)
        .and_then(|w| start.checked_add(w))
        .is_some_and(|end| end <= s.len());
    if !in_bounds {
        return Err(StepError::OutOfBounds {
            start,
            half_len,
            len: s.len(),
        });
    }
    if !step.is_square_in(s) {
        return Err(StepError::NotASquare { start, half_len });
    }
    let mut out = Vec::with_capacity(s.len() - half_len);
    out.extend_from_slice(&s.tokens[..start + half_len]);
    out.extend_from_slice(&s.tokens[start + 2 * half_len..]);
    Ok(TokenString::new(out))
}

/// Every square of `s`, ordered by `(start, half_len)`.
pub fn enumerate_squares(s: &TokenString) -> Vec<ContractionStep> {
    let t = s.tokens();
    let n = t.len();
    let mut out = Vec::new();
    for start in 0..n {
        for half_len in 1..=(n - start) / 2 {
            if t[start..start + half_len] == t[start + half_len..start + 2 * half_len] {
                out.push(ContractionStep { start, half_len });
            }
        }
    }
    out
}

/// Why an instance can be rejected without search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfeasibleReason {
    SymbolSetsDiffer,
    TargetShorter,
    FirstTokenMismatch,
    LastTokenMismatch,
    NotASubsequence,
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::SymbolSetsDiffer => "symbol sets differ",
            Self::TargetShorter => "target shorter than source",
            Self::FirstTokenMismatch => "first-token mismatch",
            Self::LastTokenMismatch => "last-token mismatch",
            Self::NotASubsequence => "source is not a subsequence of target",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "kebab-case")]
pub enum Feasibility {
    Feasible,
    Infeasible(InfeasibleReason),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Necessary conditions for `source =>* target`. `Feasible` is not a proof
/// of reachability, only the absence of a cheap refutation.
pub fn feasibility_precheck(source: &TokenString, target: &TokenString) -> Feasibility {
    use InfeasibleReason::*;
    if source == target {
        return Feasibility::Feasible;
    }
    let reason = if source.alphabet() != target.alphabet() {
        SymbolSetsDiffer
    } else if target.len() < source.len() {
        TargetShorter
    } else if source.first() != target.first() {
        FirstTokenMismatch
    } else if source.last() != target.last() {
        LastTokenMismatch
    } else if !source.is_subsequence_of(target) {
        NotASubsequence
    } else {
        return Feasibility::Feasible;
    };
    Feasibility::Infeasible(reason)
}
