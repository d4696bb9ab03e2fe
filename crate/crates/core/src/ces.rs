//! Cost-Effective Subgraph: choose `X ⊆ V` minimizing
//! `c * (|E| - |E(X)|) + |X| * |E(X)|`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum CesError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge cost must be positive")]
    ZeroCost,
    #[error("{n} vertices exceed the exhaustive bound of {max}")]
    TooLarge { n: usize, max: usize },
}

/// Simple undirected graph on vertices `0..n`, edges kept in input order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::InvalidVertex { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn edgeless(n: usize) -> Self {
        Self { n, edges: vec![] }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges
            .iter()
            .any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    /// Adjacency as bitmasks; only meaningful for `n <= 64`.
    fn adjacency_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        adj
    }

    /// Number of edges with both endpoints in `subset`.
    pub fn edges_inside(&self, subset: &BTreeSet<usize>) -> usize {
        self.edges
            .iter()
            .filter(|(u, v)| subset.contains(u) && subset.contains(v))
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CesInstance {
    pub graph: Graph,
    pub c: u64,
}

impl CesInstance {
    pub fn new(graph: Graph, c: u64) -> Result<Self, CesError> {
        if c == 0 {
            return Err(CesError::ZeroCost);
        }
        Ok(Self { graph, c })
    }

    /// `c * |E|`, the cost of the empty set.
    pub fn trivial_cost(&self) -> u64 {
        self.c * self.graph.m() as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CesSolution {
    pub subset: BTreeSet<usize>,
    pub cost: u64,
}

fn cost_from_counts(c: u64, m: usize, size: usize, inside: usize) -> u64 {
    c * (m - inside) as u64 + (size * inside) as u64
}

pub fn ces_cost(inst: &CesInstance, subset: &BTreeSet<usize>) -> Result<u64, CesError> {
    let n = inst.graph.n();
    if let Some(&v) = subset.iter().find(|&&v| v >= n) {
        return Err(GraphError::InvalidVertex { vertex: v, n }.into());
    }
    let inside = inst.graph.edges_inside(subset);
    Ok(cost_from_counts(inst.c, inst.graph.m(), subset.len(), inside))
}

/// Largest vertex count accepted by [`ces_solve_exact`].
pub const EXACT_MAX_VERTICES: usize = 25;

/// Candidate ordering: cost, then size, then the sorted vertex list.
fn better(a_cost: u64, a: &[usize], b_cost: u64, b: &[usize]) -> bool {
    match a_cost.cmp(&b_cost) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => (a.len(), a) < (b.len(), b),
    }
}

fn mask_vertices(mask: u64) -> Vec<usize> {
    (0..64).filter(|v| mask >> v & 1 == 1).collect()
}

/// Global optimum over all `2^n` subsets.
pub fn ces_solve_exact(inst: &CesInstance) -> Result<CesSolution, CesError> {
    let n = inst.graph.n();
    if n > EXACT_MAX_VERTICES {
        return Err(CesError::TooLarge {
            n,
            max: EXACT_MAX_VERTICES,
        });
    }
    let adj = inst.graph.adjacency_masks();
    let m = inst.graph.m();
    let mut best_cost = inst.trivial_cost();
    let mut best: Vec<usize> = vec![];
    for mask in 1u64..1 << n {
        let mut twice_inside = 0;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            twice_inside += (adj[v] & mask).count_ones() as usize;
            rest &= rest - 1;
        }
        let size = mask.count_ones() as usize;
        let cost = cost_from_counts(inst.c, m, size, twice_inside / 2);
        if cost > best_cost || (cost == best_cost && size > best.len()) {
            continue;
        }
        let verts = mask_vertices(mask);
        if better(cost, &verts, best_cost, &best) {
            best_cost = cost;
            best = verts;
        }
    }
    Ok(CesSolution {
        subset: best.into_iter().collect(),
        cost: best_cost,
    })
}

/// Optimum over subsets of size at most `c`, which is also the global
/// optimum: a set larger than `c` pays more than `c` per inner edge.
pub fn ces_solve_bounded(inst: &CesInstance) -> CesSolution {
    let n = inst.graph.n();
    let limit = usize::try_from(inst.c).unwrap_or(usize::MAX).min(n);
    let m = inst.graph.m();
    let mut best_cost = inst.trivial_cost();
    let mut best: Vec<usize> = vec![];

    // combinations of each size in lexicographic order
    for size in 1..=limit {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let set: BTreeSet<usize> = combo.iter().copied().collect();
            let inside = inst.graph.edges_inside(&set);
            let cost = cost_from_counts(inst.c, m, size, inside);
            if better(cost, &combo, best_cost, &best) {
                best_cost = cost;
                best = combo.clone();
            }
            // advance
            let Some(i) = (0..size).rev().find(|&i| combo[i] < n - size + i) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    CesSolution {
        subset: best.into_iter().collect(),
        cost: best_cost,
    }
}

/// True iff some subset costs at most `budget`.
pub fn ces_decide(inst: &CesInstance, budget: i64) -> Result<bool, CesError> {
    if budget >= 0 && budget as u64 >= inst.trivial_cost() {
        return Ok(true);
    }
    let best = ces_solve_exact(inst)?;
    Ok(i128::from(best.cost) <= i128::from(budget))
}
