//! Vertex elimination machinery for chordal graphs: maximum cardinality
//! search, elimination orderings, clique counting and fill-in triangulation.
//!
//! A perfect elimination ordering (PEO) is a vertex order in which every
//! vertex's earlier neighbors form a clique; a graph admits one exactly when
//! it is chordal (no induced cycle of length four or more). The `c[j]`
//! values (earlier-neighbor counts along a PEO) drive everything else:
//! `#{j : c[j] = 0}` is the component count, and binomial sums of the `c[j]`
//! count cliques of every size.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::graph::{rng_from_seed, Graph};

/// A perfect elimination ordering together with its earlier-neighbor counts.
///
/// `order[j]` is the vertex at position `j` and `c[j]` counts its neighbors
/// among positions `0..j`. For a fixed chordal graph the multiset of `c`
/// values does not depend on which PEO was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Peo {
    order: Vec<u32>,
    c: Vec<u32>,
}

impl Peo {
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Earlier-neighbor counts, aligned with `order`.
    pub fn c_values(&self) -> &[u32] {
        &self.c
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Number of positions with no earlier neighbor; equals the number of
    /// connected components of the underlying graph.
    pub fn zero_count(&self) -> usize {
        self.c.iter().filter(|&&c| c == 0).count()
    }
}

/// Evidence that a graph is not chordal: under the search order, `vertex`
/// has two earlier neighbors that are not adjacent to each other.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not chordal: earlier neighbors {left} and {right} of vertex {vertex} are non-adjacent")]
pub struct NotChordal {
    pub vertex: u32,
    pub left: u32,
    pub right: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChordalError {
    #[error("clique count overflow at size {size}")]
    CliqueCountOverflow { size: usize },
}

/// Maximum cardinality search. The visit sequence is returned as-is: on a
/// chordal graph the already-visited neighbors of each newly visited vertex
/// form a clique, so the sequence is a candidate PEO. Ties among
/// maximum-weight vertices go to the lowest index, or follow a seeded
/// random ranking if given.
fn mcs_order(g: &Graph, tie_seed: Option<u64>) -> Vec<u32> {
    let n = g.n();
    let rank: Vec<u32> = match tie_seed {
        None => (0..n as u32).collect(),
        Some(seed) => {
            let mut perm: Vec<u32> = (0..n as u32).collect();
            perm.shuffle(&mut rng_from_seed(seed));
            let mut rank = vec![0u32; n];
            for (r, &v) in perm.iter().enumerate() {
                rank[v as usize] = r as u32;
            }
            rank
        }
    };

    let mut weight = vec![0u32; n];
    let mut visited = vec![false; n];
    let mut heap: BinaryHeap<(u32, Reverse<u32>, u32)> = (0..n as u32)
        .map(|v| (0u32, Reverse(rank[v as usize]), v))
        .collect();
    let mut visit = Vec::with_capacity(n);

    while let Some((w, _, v)) = heap.pop() {
        if visited[v as usize] || w != weight[v as usize] {
            continue; // stale entry
        }
        visited[v as usize] = true;
        visit.push(v);
        for &u in g.neighbors(v) {
            if !visited[u as usize] {
                weight[u as usize] += 1;
                heap.push((weight[u as usize], Reverse(rank[u as usize]), u));
            }
        }
    }

    visit
}

fn c_values_for(g: &Graph, order: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut pos = vec![0u32; g.n()];
    for (j, &v) in order.iter().enumerate() {
        pos[v as usize] = j as u32;
    }
    let c = order
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            g.neighbors(v)
                .iter()
                .filter(|&&u| (pos[u as usize] as usize) < j)
                .count() as u32
        })
        .collect();
    (c, pos)
}

/// Checks the clique condition along `order` and reports the first failure.
///
/// For each vertex it suffices to check that its earlier neighbors, minus
/// the one with the largest position, are all adjacent to that one; chaining
/// these checks certifies every earlier neighborhood is a clique.
fn verify_order(g: &Graph, order: &[u32], pos: &[u32]) -> Result<(), NotChordal> {
    let n = g.n();
    let mut mark = vec![u32::MAX; n];
    for (j, &v) in order.iter().enumerate() {
        let mut parent: Option<u32> = None;
        for &u in g.neighbors(v) {
            if (pos[u as usize] as usize) < j {
                match parent {
                    Some(p) if pos[u as usize] <= pos[p as usize] => {}
                    _ => parent = Some(u),
                }
            }
        }
        let Some(p) = parent else { continue };
        for &u in g.neighbors(p) {
            mark[u as usize] = j as u32;
        }
        for &u in g.neighbors(v) {
            if u != p && (pos[u as usize] as usize) < j && mark[u as usize] != j as u32 {
                return Err(NotChordal {
                    vertex: v,
                    left: u,
                    right: p,
                });
            }
        }
    }
    Ok(())
}

/// Finds a perfect elimination ordering by maximum cardinality search, or a
/// non-chordality witness. Verification of the clique condition is part of
/// the contract, so an `Ok` result is a certificate of chordality.
pub fn mcs_peo(g: &Graph) -> Result<Peo, NotChordal> {
    mcs_peo_seeded(g, None)
}

/// Same as [`mcs_peo`] but with seeded tie-breaking among maximum-weight
/// vertices. Different seeds may produce different orderings, but on a
/// chordal graph the multiset of `c` values is always the same.
pub fn mcs_peo_seeded(g: &Graph, tie_seed: Option<u64>) -> Result<Peo, NotChordal> {
    let order = mcs_order(g, tie_seed);
    let (c, pos) = c_values_for(g, &order);
    verify_order(g, &order, &pos)?;
    Ok(Peo { order, c })
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// Clique counts by size from an elimination ordering: entry `i` is the
/// number of cliques on `i + 1` vertices. Adjoining the `j`-th vertex to its
/// predecessors creates `C(c[j], i)` new cliques of size `i + 1`, so the
/// counts are exact binomial sums, computed in checked integer arithmetic.
pub fn clique_counts(peo: &Peo) -> Result<Vec<u128>, ChordalError> {
    let omega = peo.c.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut counts = vec![0u128; omega];
    for &c in &peo.c {
        for (i, slot) in counts.iter_mut().enumerate().take(c as usize + 1) {
            let add = binomial_u128(c as u128, i as u128)
                .ok_or(ChordalError::CliqueCountOverflow { size: i + 1 })?;
            *slot = slot
                .checked_add(add)
                .ok_or(ChordalError::CliqueCountOverflow { size: i + 1 })?;
        }
    }
    Ok(counts)
}

/// Alternating sum of clique counts: `s(K_1) - s(K_2) + s(K_3) - ...`.
/// For counts coming from a chordal graph this equals the number of
/// connected components.
pub fn alternating_cc(counts: &[u128]) -> i128 {
    counts
        .iter()
        .enumerate()
        .map(|(i, &s)| if i % 2 == 0 { s as i128 } else { -(s as i128) })
        .sum()
}

/// Bracketing partial sums of the alternating clique-count series: the first
/// `2r` terms lower-bound the component count and the first `2r - 1` terms
/// upper-bound it.
pub fn sandwich_bounds(counts: &[u128], r: usize) -> (i128, i128) {
    assert!(r >= 1, "r must be at least 1");
    let partial = |terms: usize| {
        counts
            .iter()
            .take(terms)
            .enumerate()
            .map(|(i, &s)| if i % 2 == 0 { s as i128 } else { -(s as i128) })
            .sum::<i128>()
    };
    (partial(2 * r), partial(2 * r - 1))
}

/// Clique number read off an elimination ordering: `1 + max c[j]`
/// (0 for the empty graph).
pub fn clique_number(peo: &Peo) -> usize {
    peo.c.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

/// Chordal completion by the elimination game along a maximum cardinality
/// search order: walking the order backwards, the earlier neighbors of each
/// vertex are made pairwise adjacent. The result is a chordal supergraph on
/// the same vertex set with the same components; chordal inputs come back
/// unchanged since their order needs no fill.
pub fn triangulate(g: &Graph) -> Graph {
    let order = mcs_order(g, None);
    let n = g.n();
    let mut pos = vec![0u32; n];
    for (j, &v) in order.iter().enumerate() {
        pos[v as usize] = j as u32;
    }

    let mut adj: Vec<std::collections::BTreeSet<u32>> = (0..n)
        .map(|v| g.neighbors(v as u32).iter().copied().collect())
        .collect();

    for j in (0..n).rev() {
        let v = order[j];
        let earlier: Vec<u32> = adj[v as usize]
            .iter()
            .copied()
            .filter(|&u| (pos[u as usize] as usize) < j)
            .collect();
        for (a_idx, &a) in earlier.iter().enumerate() {
            for &b in &earlier[a_idx + 1..] {
                adj[a as usize].insert(b);
                adj[b as usize].insert(a);
            }
        }
    }

    let mut edges = Vec::new();
    for v in 0..n as u32 {
        for &u in adj[v as usize].iter() {
            if v < u {
                edges.push((v, u));
            }
        }
    }
    Graph::from_edges(n, edges).expect("fill edges are valid")
}

/// True when every edge of `sub` is also an edge of `sup` (same vertex set).
pub fn is_supergraph(sup: &Graph, sub: &Graph) -> bool {
    sup.n() == sub.n() && sub.edges().all(|(u, v)| sup.has_edge(u, v))
}
