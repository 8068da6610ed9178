//! Adversarial graph pairs: small graphs with different component counts
//! whose vertex-sampled versions are nearly indistinguishable. Tiling many
//! copies of such a pair is what forces any estimator to pay the minimax
//! price, so each generator records the structure that makes its pair hard
//! to tell apart: either a matching order (all connected subgraphs up to
//! that many vertices appear equally often in both) or a special vertex set
//! `U` whose removal makes the two graphs isomorphic.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{disjoint_union, gen_named, Graph, NamedGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairError {
    #[error("cycle construction requires r >= 4, got {0}")]
    CycleTooShort(usize),
    #[error("parity construction requires omega >= 2 and m >= 1, got omega={omega}, m={m}")]
    BadParityParameters { omega: usize, m: usize },
    #[error("clique construction requires omega >= 2, got {0}")]
    BadCliqueOrder(usize),
    #[error("star construction requires d >= 1, got {0}")]
    BadStarDegree(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum PairConstruction {
    /// Cycle plus path tail vs. one long path.
    Cycle { r: usize },
    /// Pendant sets attached to the even-size vs. odd-size subsets of a
    /// fixed clique.
    ChordalParity { omega: usize, m: usize },
    /// Disjoint cliques with binomial multiplicities, split by parity.
    CliqueParity { omega: usize },
    /// Isolated vertices vs. a star.
    Star { d: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairMeta {
    #[serde(flatten)]
    pub construction: PairConstruction,
    /// Counts of every connected subgraph on up to this many vertices agree
    /// between the two graphs (when claimed).
    pub matching_order: Option<usize>,
    pub cc_h: usize,
    pub cc_h2: usize,
    /// Vertices whose individual removal leaves isomorphic graphs; both
    /// graphs share these labels.
    pub special_u: Option<Vec<u32>>,
}

impl PairMeta {
    pub fn cc_diff(&self) -> usize {
        self.cc_h.abs_diff(self.cc_h2)
    }
}

/// Two same-size graphs with different component counts and provably close
/// sampled distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPair {
    pub h: Graph,
    pub h2: Graph,
    pub meta: PairMeta,
}

/// Cycle pair: `C_r + P_{r-2}` against `P_{2(r-1)}`. Every connected graph
/// on at most `r - 1` vertices is induced equally often in both (the only
/// such subgraphs are short paths, appearing `2r - 1 - i` times each), yet
/// the component counts differ by one.
pub fn gen_cycle_pair(r: usize) -> Result<GraphPair, PairError> {
    if r < 4 {
        return Err(PairError::CycleTooShort(r));
    }
    let h = disjoint_union(&[
        gen_named(NamedGraph::Cycle(r)).expect("r >= 4"),
        gen_named(NamedGraph::Path(r - 2)).expect("r >= 4 gives a nonempty path"),
    ]);
    let h2 = gen_named(NamedGraph::Path(2 * (r - 1))).expect("positive length");
    Ok(GraphPair {
        h,
        h2,
        meta: PairMeta {
            construction: PairConstruction::Cycle { r },
            matching_order: Some(r - 1),
            cc_h: 2,
            cc_h2: 1,
            special_u: None,
        },
    })
}

fn parity_graph(omega: usize, m: usize, want_odd: bool) -> Graph {
    let u_size = omega - 1;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for a in 0..u_size as u32 {
        for b in (a + 1)..u_size as u32 {
            edges.push((a, b));
        }
    }
    let mut next = u_size as u32;
    let mut n = u_size;
    for subset in 0u32..(1 << u_size) {
        if (subset.count_ones() % 2 == 1) != want_odd {
            continue;
        }
        for _ in 0..m {
            let v = next;
            next += 1;
            n += 1;
            let mut s = subset;
            while s != 0 {
                let u = s.trailing_zeros();
                s &= s - 1;
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("construction edges are valid")
}

/// Parity pair: fix a clique `U` on `omega - 1` shared labels, and attach
/// `m` pendant vertices to every even-size subset of `U` (first graph) or
/// every odd-size subset (second). The empty subset makes the first graph
/// carry `m` isolated vertices, so the component counts are `m + 1` versus
/// 1, yet removing any single vertex of `U` leaves isomorphic graphs. For
/// `omega = 2` the first graph degenerates to `m + 1` isolated vertices and
/// the second to a star.
pub fn gen_chordal_pair_parity(omega: usize, m: usize) -> Result<GraphPair, PairError> {
    if omega < 2 || m < 1 {
        return Err(PairError::BadParityParameters { omega, m });
    }
    let h = parity_graph(omega, m, false);
    let h2 = parity_graph(omega, m, true);
    Ok(GraphPair {
        h,
        h2,
        meta: PairMeta {
            construction: PairConstruction::ChordalParity { omega, m },
            matching_order: None,
            cc_h: m + 1,
            cc_h2: 1,
            special_u: Some((0..(omega - 1) as u32).collect()),
        },
    })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn parity_sum(omega: usize, top: usize) -> usize {
    let mut total = 0;
    let mut k = top;
    loop {
        total += binomial(omega, k);
        if k < 3 {
            break;
        }
        k -= 2;
    }
    total
}

/// Clique-parity pair: disjoint unions of cliques whose multiplicities are
/// binomial coefficients, split by the parity of the clique size. Both
/// sides contain `2^{omega-1-i} * C(omega, i)` cliques of every size
/// `i < omega`, and their component counts differ by exactly one. The
/// largest cliques are `omega` and `omega - 1` respectively.
pub fn gen_clique_pair(omega: usize) -> Result<GraphPair, PairError> {
    if omega < 2 {
        return Err(PairError::BadCliqueOrder(omega));
    }
    let build = |top: usize| -> Graph {
        let mut parts: Vec<Graph> = Vec::new();
        let mut k = top;
        loop {
            let copies = binomial(omega, k);
            let clique = gen_named(NamedGraph::Complete(k)).expect("k >= 1");
            for _ in 0..copies {
                parts.push(clique.clone());
            }
            if k < 3 {
                break;
            }
            k -= 2;
        }
        disjoint_union(&parts)
    };
    let h = build(omega);
    let h2 = build(omega - 1);
    let cc_h: usize = parity_sum(omega, omega);
    let cc_h2: usize = parity_sum(omega, omega - 1);
    Ok(GraphPair {
        h,
        h2,
        meta: PairMeta {
            construction: PairConstruction::CliqueParity { omega },
            matching_order: Some(omega - 1),
            cc_h,
            cc_h2,
            special_u: None,
        },
    })
}

/// Star pair: `d + 1` isolated vertices against a star with `d` leaves,
/// both on the same labels with the center at 0. The graphs are isomorphic
/// unless the center is sampled, so the sampled distributions are within
/// `p(1 - q^d)` of each other while the component counts differ by `d`.
pub fn gen_star_pair(d: usize) -> Result<GraphPair, PairError> {
    if d < 1 {
        return Err(PairError::BadStarDegree(d));
    }
    let h = Graph::edgeless(d + 1);
    let h2 = gen_named(NamedGraph::Star(d)).expect("d >= 1");
    Ok(GraphPair {
        h,
        h2,
        meta: PairMeta {
            construction: PairConstruction::Star { d },
            matching_order: None,
            cc_h: d + 1,
            cc_h2: 1,
            special_u: Some(vec![0]),
        },
    })
}

/// Indistinguishability bound from matching subgraph counts: when two
/// `m`-vertex graphs agree on every connected subgraph with at most `k`
/// vertices, their sampled distributions differ only if more than `k`
/// vertices are sampled. Returns the exact binomial tail
/// `P(Bin(m, p) >= k + 1)` and the Hoeffding form
/// `exp(-2(k + 1 - pm)^2 / m)` (valid for `p <= (k+1)/m`).
pub fn tv_bound_matching(m: usize, k: usize, p: f64) -> (f64, f64) {
    assert!(k <= m, "matching order cannot exceed the vertex count");
    assert!((0.0..=1.0).contains(&p), "p must be in [0, 1]");
    let q = 1.0 - p;
    let mut tail = 0.0;
    for j in (k + 1)..=m {
        tail += binomial_f64(m, j) * p.powi(j as i32) * q.powi((m - j) as i32);
    }
    let slack = k as f64 + 1.0 - p * m as f64;
    let hoeffding = (-2.0 * slack * slack / m as f64).exp();
    (tail, hoeffding)
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Indistinguishability bound from the shared-label coupling: if removing
/// any single vertex of `U` leaves isomorphic graphs, the sampled versions
/// can only differ when all of `U` is sampled, giving `p^|U|`. If the two
/// graphs also agree on `U` itself, at least one outside vertex must be
/// sampled too, giving `p^|U| (1 - q^{|V|-|U|})`.
pub fn tv_bound_coupling(u_size: usize, v_size: usize, p: f64, shared_u: bool) -> f64 {
    assert!(u_size <= v_size, "U cannot exceed the vertex set");
    assert!((0.0..=1.0).contains(&p), "p must be in [0, 1]");
    let base = p.powi(u_size as i32);
    if shared_u {
        base * (1.0 - (1.0 - p).powi((v_size - u_size) as i32))
    } else {
        base
    }
}

/// Worst-case error scale implied by tiling a hard pair: with parent size
/// `N`, pair size `m` (`M = floor(N/m)` copies) and sampled-distribution
/// distance `tv`, no estimator can beat an additive error of
/// `|f(H) - f(H')|/8 * min(sqrt(M/tv), M)` with small failure probability.
/// A vanishing `tv` saturates at the `M` cap.
pub fn mainlb_delta(f_h: f64, f_h2: f64, big_n: u64, m: u64, tv: f64) -> f64 {
    assert!(m >= 1, "pair size must be positive");
    let copies = (big_n / m) as f64;
    let scale = if tv > 0.0 {
        (copies / tv).sqrt().min(copies)
    } else {
        copies
    };
    (f_h - f_h2).abs() / 8.0 * scale
}
