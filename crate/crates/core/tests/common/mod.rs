//! Independent oracles shared by the integration suites. Nothing here calls
//! into the search, kernel or solver code it is used to check.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use tdk_core::ces::Graph;

/// Breadth-first search over the contraction graph of `target`, written
/// directly on `u32` slices. `None` when `source` is unreachable.
pub fn bfs_distance(source: &[u32], target: &[u32]) -> Option<usize> {
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(target.to_vec());
    queue.push_back((target.to_vec(), 0usize));
    while let Some((cur, dist)) = queue.pop_front() {
        if cur == source {
            return Some(dist);
        }
        let n = cur.len();
        for i in 0..n {
            let mut h = 1;
            while i + 2 * h <= n {
                if cur[i..i + h] == cur[i + h..i + 2 * h] {
                    let mut next = cur[..i + h].to_vec();
                    next.extend_from_slice(&cur[i + 2 * h..]);
                    if next.len() >= source.len() && seen.insert(next.clone()) {
                        queue.push_back((next, dist + 1));
                    }
                }
                h += 1;
            }
        }
    }
    None
}

/// All `(start, half_len)` squares by a plain triple loop.
pub fn naive_squares(s: &[u32]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for start in 0..s.len() {
        for half in 1..=s.len() {
            if start + 2 * half > s.len() {
                break;
            }
            if (0..half).all(|t| s[start + t] == s[start + half + t]) {
                out.push((start, half));
            }
        }
    }
    out
}

pub fn has_clique(graph: &Graph, k: usize) -> bool {
    let n = graph.n();
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in graph.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).any(|mask| {
        let vs: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&v| adj[u][v]))
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of simple graphs on `n`
/// vertices, by minimum edge bitmask over all relabelings.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let index = |u: usize, v: usize| {
        let (a, b) = (u.min(v), u.max(v));
        pairs.iter().position(|&p| p == (a, b)).unwrap()
    };
    let maps: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .map(|perm| pairs.iter().map(|&(u, v)| index(perm[u], perm[v])).collect())
        .collect();

    let mut classes = HashSet::new();
    let mut reps = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let canon = maps
            .iter()
            .map(|map| {
                (0..pairs.len())
                    .filter(|e| mask >> e & 1 == 1)
                    .fold(0u32, |acc, e| acc | 1 << map[e])
            })
            .min()
            .unwrap();
        if classes.insert(canon) {
            let edges = (0..pairs.len())
                .filter(|e| canon >> e & 1 == 1)
                .map(|e| pairs[e])
                .collect();
            reps.push(Graph::new(n, edges).unwrap());
        }
    }
    reps
}

/// Every labeled simple graph on `n` vertices.
pub fn labeled_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let edges = (0..pairs.len())
                .filter(|e| mask >> e & 1 == 1)
                .map(|e| pairs[e])
                .collect();
            Graph::new(n, edges).unwrap()
        })
        .collect()
}

pub fn raw(s: &tdk_core::TokenString) -> Vec<u32> {
    s.iter().map(|sym| sym.0).collect()
}
