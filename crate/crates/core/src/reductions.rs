//! Hardness reductions: CLIQUE to Cost-Effective Subgraph, and Cost-Effective
//! Subgraph to exemplar tandem duplication distance.
//!
//! The second reduction builds a source `S = 𝓑_{2p} 𝓧 Δ` and a target
//! `T = 𝓑⁰_{2p} 𝓧^d Δ 𝓑¹_{2p} 𝓧 Δ E_1 .. E_p` where every edge gadget is
//! `E_i = 𝓑_i^{01} 𝓧_{e_i} Δ 𝓑¹_{2p} 𝓧 Δ`. Blocks `B_j` for `j >= 2` are single
//! symbols; `B_0` and `B_1` are exemplar runs whose starred versions are
//! their character doublings, and so are the vertex strings `X_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ces::{CesError, CesInstance, Graph};
use crate::strings::{apply_contraction, ContractionStep, StepError, SymbolTable, TokenString};

/// Default ceiling on the target length, in tokens.
pub const DEFAULT_SIZE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum ReductionError {
    #[error("clique size {0} must be even")]
    OddK(usize),
    #[error("clique size {k} must lie in 2..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("case {case} does not admit l = {l}, h = {h} for k = {k}")]
    BadCaseRange { case: u8, k: i64, l: i64, h: i64 },
    #[error("p = {p} is not a positive multiple of m = {m}")]
    PNotMultipleOfM { p: u64, m: usize },
    #[error("the reduction needs a graph with at least one edge")]
    NoEdges,
    #[error("parameters must be positive (d = {d}, c = {c})")]
    NonPositive { d: u64, c: u64 },
    #[error("target would have {estimated} tokens, above the cap of {cap}")]
    SizeCapExceeded { estimated: u128, cap: u64 },
    #[error("vertex {vertex} out of range for {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error(transparent)]
    Ces(#[from] CesError),
}

fn choose2(x: i64) -> i64 {
    x * (x - 1) / 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueToCesOutput {
    pub instance: CesInstance,
    pub k: usize,
    /// Cost threshold; negative when `c * m` is below the clique saving.
    pub r: i64,
}

/// Maps `(G, k)` to `(G, c = 3k/2, r = c*m - (k/2) * C(k, 2))`: `G` has a
/// `k`-clique iff some subset costs at most `r`.
pub fn clique_to_ces(graph: &Graph, k: usize) -> Result<CliqueToCesOutput, ReductionError> {
    if k % 2 == 1 {
        return Err(ReductionError::OddK(k));
    }
    if k < 2 || k > graph.n() {
        return Err(ReductionError::KOutOfRange { k, n: graph.n() });
    }
    let c = 3 * k as u64 / 2;
    let ki = k as i64;
    let r = c as i64 * graph.m() as i64 - (ki / 2) * choose2(ki);
    Ok(CliqueToCesOutput {
        instance: CesInstance::new(graph.clone(), c)?,
        k,
        r,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapCase {
    /// `|X| = k`, `h > 0` edges missing.
    ExactSize,
    /// `|X| = k + l`.
    Larger,
    /// `|X| = k - l`.
    Smaller,
}

impl GapCase {
    pub fn number(self) -> u8 {
        match self {
            GapCase::ExactSize => 1,
            GapCase::Larger => 2,
            GapCase::Smaller => 3,
        }
    }
}

/// `cost(X) - r` in closed form, for `|E(X)| = C(|X|, 2) - h`.
pub fn clique_ces_case_gap(
    k: i64,
    l: i64,
    h: i64,
    case: GapCase,
) -> Result<Ratio<i64>, ReductionError> {
    let in_range = k >= 2
        && k % 2 == 0
        && h >= 0
        && match case {
            GapCase::ExactSize => l == 0 && h > 0,
            GapCase::Larger => l > 0,
            GapCase::Smaller => l > 0 && l < k,
        };
    if !in_range {
        return Err(ReductionError::BadCaseRange {
            case: case.number(),
            k,
            l,
            h,
        });
    }
    let q = |num: i64, den: i64| Ratio::new(num, den);
    let kh = q(k, 2);
    let gap = match case {
        GapCase::ExactSize => q(h * (3 * k / 2 - k), 1),
        GapCase::Larger => {
            q(3 * k * l * l, 4) - q(k * l, 4) + q(l * l * l, 2) - q(l * l, 2)
                + (kh - l) * h
        }
        GapCase::Smaller => {
            q(3 * k * l * l, 4) + q(k * l, 4) - q(l * l * l, 2) - q(l * l, 2)
                + (kh + l) * h
        }
    };
    Ok(gap)
}

/// Gadget scale parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub d: u64,
    pub p: u64,
}

impl ReductionParams {
    /// `d = m + 1`, `p = m (n + m)^10`; `None` if `p` overflows.
    pub fn full_scale(n: usize, m: usize) -> Option<Self> {
        let base = (n as u64).checked_add(m as u64)?;
        let p = base.checked_pow(10)?.checked_mul(m as u64)?;
        Some(Self {
            d: m as u64 + 1,
            p,
        })
    }

    /// Whether these parameters reach the scale at which minimum contraction
    /// sequences are forced into the intended shape.
    fn meets_default_scale(&self, n: usize, m: usize) -> bool {
        let base = n as u128 + m as u128;
        let p_default = base
            .checked_pow(10)
            .and_then(|b| b.checked_mul(m as u128));
        let p_ok = p_default.is_some_and(|pd| self.p as u128 >= pd);
        p_ok && self.d > m as u64
    }
}

/// What a generated instance can be trusted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equivalence {
    /// Only the subset-to-schedule direction holds; `p` is too small for the
    /// converse.
    #[serde(rename = "forward-witness only")]
    ForwardWitnessOnly,
    #[serde(rename = "full")]
    Full,
}

impl Equivalence {
    /// `Full` only once `p >= m (n + m)^10` and `d >= m + 1`.
    pub fn for_params(n: usize, m: usize, params: ReductionParams) -> Self {
        if params.meets_default_scale(n, m) {
            Equivalence::Full
        } else {
            Equivalence::ForwardWitnessOnly
        }
    }
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equivalence::ForwardWitnessOnly => f.write_str("forward-witness only"),
            Equivalence::Full => f.write_str("full"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "kebab-case")]
pub enum SymbolRole {
    /// Single-symbol block `B_j`, `j >= 2`.
    Block { index: u64 },
    /// Position inside `B_0`.
    B0 { pos: u64 },
    /// Position inside `B_1`.
    B1 { pos: u64 },
    /// Position inside `X_v`.
    Vertex { vertex: usize, pos: u64 },
    Delta,
}

/// Component lengths shared by the builder, the size estimate and the
/// witness generator.
#[derive(Clone, Copy, Debug)]
struct Layout {
    n: u128,
    d: u128,
    p: u128,
    /// `|B_0| = dc + 2d - 2`
    l0: u128,
    /// `|B_1| = dn + 2d - 1`
    l1: u128,
}

impl Layout {
    fn new(n: usize, c: u64, params: ReductionParams) -> Self {
        let (n, d, p, c) = (
            n as u128,
            params.d as u128,
            params.p as u128,
            c as u128,
        );
        Self {
            n,
            d,
            p,
            l0: d * c + 2 * d - 2,
            l1: d * n + 2 * d - 1,
        }
    }

    fn singles(&self) -> u128 {
        2 * self.p - 1
    }

    fn dn(&self) -> u128 {
        self.d * self.n
    }

    /// `|𝓑¹_{2p} 𝓧 Δ|`
    fn tail(&self) -> u128 {
        self.singles() + 2 * self.l1 + self.l0 + self.dn() + 1
    }

    fn gadget(&self, i: u128) -> u128 {
        (i - 1) + 2 * self.l1 + 2 * self.l0 + 2 * self.dn() - 2 * self.d + 1 + self.tail()
    }

    fn source_len(&self) -> u128 {
        self.singles() + self.l1 + self.l0 + self.dn() + 1
    }

    fn target_len(&self) -> u128 {
        let p = self.p;
        let head = self.singles() + self.l1 + 2 * self.l0 + 2 * self.dn() + 1 + self.tail();
        let per_gadget_fixed =
            2 * self.l1 + 2 * self.l0 + 2 * self.dn() - 2 * self.d + 1 + self.tail();
        // saturates for full-scale p, which only ever feeds the size cap
        head.saturating_add(p.saturating_mul(p - 1) / 2)
            .saturating_add(p.saturating_mul(per_gadget_fixed))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub size_cap: u64,
    pub force: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            size_cap: DEFAULT_SIZE_CAP,
            force: false,
        }
    }
}

/// Generated exemplar tandem-duplication instance.
#[derive(Clone, Debug)]
pub struct TdReduction {
    pub source: TokenString,
    pub target: TokenString,
    pub table: SymbolTable,
    pub graph: Graph,
    pub c: u64,
    pub r: i64,
    pub params: ReductionParams,
    /// `(p/m) d (r + nm) + 4cdn`
    pub budget: i64,
    pub equivalence: Equivalence,
    pub symbol_roles: BTreeMap<String, SymbolRole>,
}

/// Estimated `(|S|, |T|)` without building anything.
pub fn estimate_sizes(graph: &Graph, c: u64, params: ReductionParams) -> (u128, u128) {
    let layout = Layout::new(graph.n(), c, params);
    (layout.source_len(), layout.target_len())
}

fn validate(graph: &Graph, c: u64, params: ReductionParams) -> Result<(), ReductionError> {
    let m = graph.m();
    if m == 0 {
        return Err(ReductionError::NoEdges);
    }
    if params.d == 0 || c == 0 {
        return Err(ReductionError::NonPositive { d: params.d, c });
    }
    if params.p == 0 || !params.p.is_multiple_of(m as u64) {
        return Err(ReductionError::PNotMultipleOfM { p: params.p, m });
    }
    Ok(())
}

struct Alphabet {
    table: SymbolTable,
    roles: BTreeMap<String, SymbolRole>,
}

impl Alphabet {
    fn add(&mut self, name: String, role: SymbolRole) -> crate::strings::Symbol {
        let sym = self.table.intern(&name);
        self.roles.insert(name, role);
        sym
    }
}

pub fn ces_to_td(
    graph: &Graph,
    c: u64,
    r: i64,
    params: ReductionParams,
    options: BuildOptions,
) -> Result<TdReduction, ReductionError> {
    validate(graph, c, params)?;
    let layout = Layout::new(graph.n(), c, params);
    let estimated = layout.target_len();
    if !options.force && estimated > options.size_cap as u128 {
        return Err(ReductionError::SizeCapExceeded {
            estimated,
            cap: options.size_cap,
        });
    }
    if estimated > usize::MAX as u128 / 2 {
        return Err(ReductionError::SizeCapExceeded {
            estimated,
            cap: options.size_cap,
        });
    }

    let n = graph.n();
    let (d, p) = (params.d, params.p);
    let mut alpha = Alphabet {
        table: SymbolTable::new(),
        roles: BTreeMap::new(),
    };

    // Symbols in order of appearance in S.
    let singles: Vec<_> = (2..=2 * p)
        .rev()
        .map(|j| alpha.add(format!("B{j}"), SymbolRole::Block { index: j }))
        .collect();
    let b1: Vec<_> = (0..layout.l1 as u64)
        .map(|pos| alpha.add(format!("B1_{pos}"), SymbolRole::B1 { pos }))
        .collect();
    let b0: Vec<_> = (0..layout.l0 as u64)
        .map(|pos| alpha.add(format!("B0_{pos}"), SymbolRole::B0 { pos }))
        .collect();
    let xs: Vec<Vec<_>> = (0..n)
        .map(|vertex| {
            (0..d)
                .map(|pos| alpha.add(format!("X{vertex}_{pos}"), SymbolRole::Vertex { vertex, pos }))
                .collect()
        })
        .collect();
    let delta = alpha.add("DELTA".to_owned(), SymbolRole::Delta);

    let doubled = |run: &[crate::strings::Symbol]| -> Vec<_> {
        run.iter().flat_map(|&s| [s, s]).collect()
    };
    let b0_star = doubled(&b0);
    let b1_star = doubled(&b1);
    let xs_star: Vec<Vec<_>> = xs.iter().map(|x| doubled(x)).collect();
    let calx: Vec<_> = xs.iter().flatten().copied().collect();
    let calx_d: Vec<_> = xs_star.iter().flatten().copied().collect();

    // B_q .. B_2 occupies the last q - 1 entries of `singles`.
    let head = |q: u64| &singles[singles.len() - (q as usize - 1)..];
    let block_string = |q: u64, one_star: bool, zero_star: bool| -> Vec<_> {
        let mut v = head(q).to_vec();
        v.extend_from_slice(if one_star { &b1_star } else { &b1 });
        v.extend_from_slice(if zero_star { &b0_star } else { &b0 });
        v
    };

    let mut source = block_string(2 * p, false, false);
    source.extend_from_slice(&calx);
    source.push(delta);

    let mut tail = block_string(2 * p, true, false);
    tail.extend_from_slice(&calx);
    tail.push(delta);

    let mut target = Vec::with_capacity(estimated as usize);
    target.extend(block_string(2 * p, false, true));
    target.extend_from_slice(&calx_d);
    target.push(delta);
    target.extend_from_slice(&tail);
    let edges = graph.edges();
    for i in 1..=p {
        let (u, v) = edges[((i - 1) % edges.len() as u64) as usize];
        target.extend(block_string(i, true, true));
        for (w, (x, x_star)) in xs.iter().zip(&xs_star).enumerate() {
            target.extend_from_slice(if w == u || w == v { x } else { x_star });
        }
        target.push(delta);
        target.extend_from_slice(&tail);
    }
    debug_assert_eq!(target.len() as u128, estimated);
    debug_assert_eq!(source.len() as u128, layout.source_len());

    let (n_i, m_i) = (n as i64, graph.m() as i64);
    let budget = (p as i64 / m_i) * d as i64 * (r + n_i * m_i) + 4 * c as i64 * d as i64 * n_i;
    let equivalence = Equivalence::for_params(n, graph.m(), params);

    Ok(TdReduction {
        source: TokenString::new(source),
        target: TokenString::new(target),
        table: alpha.table,
        graph: graph.clone(),
        c,
        r,
        params,
        budget,
        equivalence,
        symbol_roles: alpha.roles,
    })
}

/// Contraction counts per phase of the forward schedule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseLog {
    /// Gadgets whose edge is not inside the subset, `dn + dc` each.
    pub outside_gadgets: usize,
    /// `X_v^d -> X_v` for chosen vertices.
    pub activation: usize,
    /// Gadgets whose edge lies inside the subset, `dn + d|W|` each.
    pub inside_gadgets: usize,
    /// Remaining vertex strings, both blockers, and the final halving.
    pub cleanup: usize,
}

impl PhaseLog {
    pub fn total(&self) -> usize {
        self.outside_gadgets + self.activation + self.inside_gadgets + self.cleanup
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSchedule {
    pub steps: Vec<ContractionStep>,
    pub phase_log: PhaseLog,
}

/// Contractions of a doubled run `x0 x0 x1 x1 ..` of `len` characters that
/// starts at `pos`. Left copies are kept so the next pair sits one further.
fn undouble(steps: &mut Vec<ContractionStep>, pos: usize, len: usize) {
    steps.extend((0..len).map(|t| ContractionStep::new(pos + t, 1)));
}

/// The forward-direction contraction schedule from `T` to `S` induced by the
/// vertex subset `chosen`.
pub fn build_witness(
    red: &TdReduction,
    chosen: &BTreeSet<usize>,
) -> Result<WitnessSchedule, ReductionError> {
    let graph = &red.graph;
    let n = graph.n();
    if let Some(&v) = chosen.iter().find(|&&v| v >= n) {
        return Err(ReductionError::InvalidVertex { vertex: v, n });
    }
    let lay = Layout::new(n, red.c, red.params);
    let u = |x: u128| x as usize;
    let (d, p, l0, l1, dn) = (u(lay.d), u(lay.p), u(lay.l0), u(lay.l1), u(lay.dn()));
    let singles = u(lay.singles());
    let tail = u(lay.tail());
    let edges = graph.edges();
    let edge_of = |i: usize| edges[(i - 1) % edges.len()];
    let inside = |i: usize| {
        let (a, b) = edge_of(i);
        chosen.contains(&a) && chosen.contains(&b)
    };

    let mut steps = Vec::new();
    let mut log = PhaseLog::default();

    // Current prefix 𝓑⁰_{2p} 𝓧_W Δ 𝓑¹_{2p} 𝓧 Δ.
    let mut xw = vec![2 * d; n];
    let xw_base = singles + l1 + 2 * l0;
    let prefix_len = |xw: &[usize]| xw_base + xw.iter().sum::<usize>() + 1 + tail;

    // Outside gadgets, left to right; inside gadgets stay put for now.
    let mut offset = prefix_len(&xw);
    for i in 1..=p {
        if inside(i) {
            offset += u(lay.gadget(i as u128));
            continue;
        }
        let before = steps.len();
        let (a, b) = edge_of(i);
        let g = offset;
        undouble(&mut steps, g + (i - 1) + 2 * l1, l0);
        let mut pos = g + (i - 1) + 2 * l1 + l0;
        for w in 0..n {
            if w != a && w != b {
                undouble(&mut steps, pos, d);
            }
            pos += d;
        }
        let lead = (i - 1) + 2 * l1 + l0 + dn + 1;
        steps.push(ContractionStep::new(g - lead, lead));
        steps.push(ContractionStep::new(g - tail, tail));
        log.outside_gadgets += steps.len() - before;
    }

    // Activation of the chosen vertices in 𝓧^d.
    let before = steps.len();
    for &v in chosen {
        let pos = xw_base + xw[..v].iter().sum::<usize>();
        undouble(&mut steps, pos, d);
        xw[v] = d;
    }
    log.activation = steps.len() - before;

    // Inside gadgets; each is the leftmost remaining one when processed.
    let before = steps.len();
    for i in (1..=p).filter(|&i| inside(i)) {
        let (a, b) = edge_of(i);
        let g = prefix_len(&xw);
        undouble(&mut steps, g + (i - 1), l1);
        let mut pos = g + (i - 1) + l1 + 2 * l0;
        for w in 0..n {
            if w == a || w == b {
                pos += d;
            } else if chosen.contains(&w) {
                undouble(&mut steps, pos, d);
                pos += d;
            } else {
                pos += 2 * d;
            }
        }
        let start = 2 * p - i;
        steps.push(ContractionStep::new(start, g - start));
    }
    log.inside_gadgets = steps.len() - before;

    // Cleanup: 𝓧_W -> 𝓧, both blockers, final halving.
    let before = steps.len();
    for v in (0..n).filter(|v| !chosen.contains(v)) {
        let pos = xw_base + xw[..v].iter().sum::<usize>();
        undouble(&mut steps, pos, d);
        xw[v] = d;
    }
    undouble(&mut steps, singles + l1, l0);
    let plain_blocks = singles + l1 + l0;
    undouble(&mut steps, plain_blocks + dn + 1 + singles, l1);
    steps.push(ContractionStep::new(0, plain_blocks + dn + 1));
    log.cleanup = steps.len() - before;

    Ok(WitnessSchedule {
        steps,
        phase_log: log,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum VerifyFailure {
    InvalidStep { error: StepError },
    FinalMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum VerifyOutcome {
    Verified { length: usize },
    Failed {
        step_index: usize,
        #[serde(flatten)]
        failure: VerifyFailure,
    },
}

impl VerifyOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerifyOutcome::Verified { .. })
    }
}

/// Replays `steps` from `target`; a final mismatch is reported at index
/// `steps.len()`.
pub fn verify_contraction_sequence(
    target: &TokenString,
    steps: &[ContractionStep],
    source: &TokenString,
) -> VerifyOutcome {
    let mut current = target.clone();
    for (step_index, &step) in steps.iter().enumerate() {
        match apply_contraction(&current, step) {
            Ok(next) => current = next,
            Err(error) => {
                return VerifyOutcome::Failed {
                    step_index,
                    failure: VerifyFailure::InvalidStep { error },
                }
            }
        }
    }
    if &current == source {
        VerifyOutcome::Verified {
            length: steps.len(),
        }
    } else {
        VerifyOutcome::Failed {
            step_index: steps.len(),
            failure: VerifyFailure::FinalMismatch,
        }
    }
}

/// Serializable description of a generated instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionManifest {
    pub schema: String,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub c: u64,
    pub r: i64,
    pub params: ReductionParams,
    pub budget: i64,
    pub source_len: usize,
    pub target_len: usize,
    pub equivalence: Equivalence,
    pub symbol_roles: BTreeMap<String, SymbolRole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_file: Option<String>,
}

pub const MANIFEST_SCHEMA: &str = "tdk.reduction/v1";

impl TdReduction {
    pub fn manifest(&self) -> ReductionManifest {
        ReductionManifest {
            schema: MANIFEST_SCHEMA.to_owned(),
            n: self.graph.n(),
            edges: self.graph.edges().to_vec(),
            c: self.c,
            r: self.r,
            params: self.params,
            budget: self.budget,
            source_len: self.source.len(),
            target_len: self.target.len(),
            equivalence: self.equivalence,
            symbol_roles: self.symbol_roles.clone(),
            source_file: None,
            target_file: None,
        }
    }
}

impl ReductionManifest {
    /// Rebuilds the instance described by the manifest.
    pub fn rebuild(&self, options: BuildOptions) -> Result<TdReduction, ReductionError> {
        let graph = Graph::new(self.n, self.edges.clone()).map_err(CesError::from)?;
        ces_to_td(&graph, self.c, self.r, self.params, options)
    }
}
