//! Undirected simple graphs with dense vertex labels `0..n-1`.
//!
//! The vertex count is explicit so that isolated vertices survive every
//! operation, including text round-trips. Graphs are immutable once built
//! and cheap to share across threads.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// The one seedable generator used across the whole crate. Every randomized
/// operation takes an explicit `u64` seed and is bit-reproducible.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge endpoint {vertex} out of range for {n} vertices")]
    EndpointOutOfRange { vertex: u32, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(u32, u32),
    #[error("vertex set is not sorted and duplicate-free")]
    InvalidVertexSet,
    #[error("vertex set contains {vertex}, out of range for {n} vertices")]
    VertexSetOutOfRange { vertex: u32, n: usize },
    #[error("invalid parameter for named graph: {0}")]
    InvalidNamedParameter(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed header on line {line}: expected \"N M\", got {text:?}")]
    MalformedHeader { line: usize, text: String },
    #[error("malformed edge on line {line}: expected \"u v\", got {text:?}")]
    MalformedEdge { line: usize, text: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("expected {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
}

/// Undirected simple graph. Adjacency lists are sorted; no self-loops or
/// parallel edges.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<u32>>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.m)
    }
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn edgeless(n: usize) -> Graph {
        Graph {
            n,
            m: 0,
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range endpoints.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Graph, GraphError> {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0usize;
        for (u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::EndpointOutOfRange { vertex: u, n });
            }
            if v as usize >= n {
                return Err(GraphError::EndpointOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            m += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                let v = list
                    .windows(2)
                    .find(|w| w[0] == w[1])
                    .map(|w| w[0])
                    .unwrap();
                return Err(GraphError::DuplicateEdge(u.min(v as usize) as u32, u.max(v as usize) as u32));
            }
        }
        Ok(Graph { n, m, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| (u as u32) < v)
                .map(move |&v| (u as u32, v))
        })
    }

    /// Edge-list text form, mirroring the accepted input format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.m);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{} {}", u, v);
        }
        out
    }
}

/// Sorted, duplicate-free set of vertex indices of some graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    members: Vec<u32>,
}

impl VertexSet {
    /// Wraps an already sorted, duplicate-free index list.
    pub fn new(members: Vec<u32>) -> Result<VertexSet, GraphError> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GraphError::InvalidVertexSet);
        }
        Ok(VertexSet { members })
    }

    /// Sorts and validates an arbitrary index list.
    pub fn from_unsorted(mut members: Vec<u32>) -> Result<VertexSet, GraphError> {
        members.sort_unstable();
        VertexSet::new(members)
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    fn check_range(&self, n: usize) -> Result<(), GraphError> {
        match self.members.last() {
            Some(&v) if v as usize >= n => Err(GraphError::VertexSetOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }
}

/// Parses the edge-list text format: first non-comment line `N M`, then `M`
/// lines `u v`. `#` starts a comment; blank lines and CRLF are accepted.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut seen: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let a = fields.next();
        let b = fields.next();
        let rest = fields.next();
        match header {
            None => {
                let (Some(a), Some(b), None) = (a, b, rest) else {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        text: line.to_string(),
                    });
                };
                let (Ok(n), Ok(m)) = (a.parse::<usize>(), b.parse::<usize>()) else {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        text: line.to_string(),
                    });
                };
                header = Some((n, m));
                edges.reserve(m);
            }
            Some((n, _)) => {
                let (Some(a), Some(b), None) = (a, b, rest) else {
                    return Err(ParseError::MalformedEdge {
                        line: line_no,
                        text: line.to_string(),
                    });
                };
                let (Ok(u), Ok(v)) = (a.parse::<u32>(), b.parse::<u32>()) else {
                    return Err(ParseError::MalformedEdge {
                        line: line_no,
                        text: line.to_string(),
                    });
                };
                // Report range/loop/duplicate violations eagerly with the line.
                if u as usize >= n {
                    return Err(ParseError::Graph {
                        line: line_no,
                        source: GraphError::EndpointOutOfRange { vertex: u, n },
                    });
                }
                if v as usize >= n {
                    return Err(ParseError::Graph {
                        line: line_no,
                        source: GraphError::EndpointOutOfRange { vertex: v, n },
                    });
                }
                if u == v {
                    return Err(ParseError::Graph {
                        line: line_no,
                        source: GraphError::SelfLoop(u),
                    });
                }
                let e = (u.min(v), u.max(v));
                if !seen.insert(e) {
                    return Err(ParseError::Graph {
                        line: line_no,
                        source: GraphError::DuplicateEdge(e.0, e.1),
                    });
                }
                edges.push(e);
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(ParseError::MalformedHeader {
            line: 0,
            text: String::new(),
        });
    };
    if edges.len() != m {
        return Err(ParseError::EdgeCountMismatch {
            expected: m,
            found: edges.len(),
        });
    }
    Graph::from_edges(n, edges).map_err(|source| ParseError::Graph { line: 0, source })
}

/// Number of connected components plus a per-vertex component label.
/// Labels are assigned in order of first appearance, so vertex 0 is always
/// in component 0 (when the graph is nonempty).
pub fn connected_components(g: &Graph) -> (usize, Vec<u32>) {
    let n = g.n();
    let mut parent: Vec<u32> = (0..n as u32).collect();

    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let up = parent[parent[x as usize] as usize];
            parent[x as usize] = up;
            x = up;
        }
        x
    }

    for (u, v) in g.edges() {
        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        if ru != rv {
            parent[ru.max(rv) as usize] = ru.min(rv);
        }
    }

    let mut labels = vec![u32::MAX; n];
    let mut count = 0usize;
    for v in 0..n as u32 {
        let root = find(&mut parent, v);
        if labels[root as usize] == u32::MAX {
            labels[root as usize] = count as u32;
            count += 1;
        }
        labels[v as usize] = labels[root as usize];
    }
    (count, labels)
}

/// Subgraph induced by `s`, with vertices relabeled `0..|s|-1` in the sorted
/// order of `s`. Also returns the relabeling map (new index -> original).
pub fn induced_subgraph(g: &Graph, s: &VertexSet) -> Result<(Graph, Vec<u32>), GraphError> {
    s.check_range(g.n())?;
    let members = s.members();
    let mut new_id = vec![u32::MAX; g.n()];
    for (i, &v) in members.iter().enumerate() {
        new_id[v as usize] = i as u32;
    }
    let mut edges = Vec::new();
    for (i, &v) in members.iter().enumerate() {
        for &w in g.neighbors(v) {
            if w > v && new_id[w as usize] != u32::MAX {
                edges.push((i as u32, new_id[w as usize]));
            }
        }
    }
    let sub = Graph::from_edges(members.len(), edges).expect("induced edges are valid");
    Ok((sub, members.to_vec()))
}

/// Disjoint union; vertex labels of the `i`-th summand are offset by the
/// total size of the preceding ones. Component counts add.
pub fn disjoint_union(graphs: &[Graph]) -> Graph {
    let n: usize = graphs.iter().map(Graph::n).sum();
    let mut edges = Vec::with_capacity(graphs.iter().map(Graph::edge_count).sum());
    let mut offset = 0u32;
    for g in graphs {
        edges.extend(g.edges().map(|(u, v)| (u + offset, v + offset)));
        offset += g.n() as u32;
    }
    Graph::from_edges(n, edges).expect("offset edges are valid")
}

/// Erdős–Rényi graph: each of the `C(n,2)` pairs is an edge independently
/// with probability `delta`. Deterministic for a fixed seed.
pub fn gen_er(n: usize, delta: f64, seed: u64) -> Graph {
    assert!((0.0..=1.0).contains(&delta), "delta must be in [0, 1]");
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.gen::<f64>() < delta {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("generated edges are valid")
}

/// The classical named families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedGraph {
    /// `K_k`
    Complete(usize),
    /// `P_k`, the path on `k` vertices.
    Path(usize),
    /// `C_k`, requires `k >= 3`.
    Cycle(usize),
    /// `S_k`, the star with `k` leaves (`k + 1` vertices).
    Star(usize),
}

pub fn gen_named(kind: NamedGraph) -> Result<Graph, GraphError> {
    match kind {
        NamedGraph::Complete(k) => {
            if k < 1 {
                return Err(GraphError::InvalidNamedParameter("complete requires k >= 1".into()));
            }
            let edges = (0..k as u32)
                .flat_map(|u| ((u + 1)..k as u32).map(move |v| (u, v)))
                .collect::<Vec<_>>();
            Graph::from_edges(k, edges)
        }
        NamedGraph::Path(k) => {
            if k < 1 {
                return Err(GraphError::InvalidNamedParameter("path requires k >= 1".into()));
            }
            Graph::from_edges(k, (1..k as u32).map(|v| (v - 1, v)))
        }
        NamedGraph::Cycle(k) => {
            if k < 3 {
                return Err(GraphError::InvalidNamedParameter("cycle requires k >= 3".into()));
            }
            let mut edges: Vec<(u32, u32)> = (1..k as u32).map(|v| (v - 1, v)).collect();
            edges.push((0, k as u32 - 1));
            Graph::from_edges(k, edges)
        }
        NamedGraph::Star(k) => {
            if k < 1 {
                return Err(GraphError::InvalidNamedParameter("star requires k >= 1".into()));
            }
            Graph::from_edges(k + 1, (1..=k as u32).map(|v| (0, v)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let g = parse_edge_list("3 1\n0 1").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));
        assert!(!g.has_edge(1, 2));
    }

    #[test]
    fn parse_isolated_only() {
        let g = parse_edge_list("4 0").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parse_rejects_out_of_range() {
        let err = parse_edge_list("2 1\n0 2").unwrap_err();
        assert!(matches!(
            err,
            ParseError::Graph {
                source: GraphError::EndpointOutOfRange { vertex: 2, n: 2 },
                ..
            }
        ));
    }

    #[test]
    fn parse_rejects_self_loop_and_duplicate() {
        assert!(matches!(
            parse_edge_list("3 1\n1 1").unwrap_err(),
            ParseError::Graph {
                source: GraphError::SelfLoop(1),
                ..
            }
        ));
        assert!(matches!(
            parse_edge_list("3 2\n0 1\n1 0").unwrap_err(),
            ParseError::Graph {
                source: GraphError::DuplicateEdge(0, 1),
                ..
            }
        ));
    }

    #[test]
    fn parse_handles_comments_and_crlf() {
        let g = parse_edge_list("# a comment\r\n3 2 # trailing\r\n\r\n0 1\r\n1 2\r\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn parse_rejects_bad_header_and_count() {
        assert!(matches!(
            parse_edge_list("x y\n").unwrap_err(),
            ParseError::MalformedHeader { .. }
        ));
        assert!(matches!(
            parse_edge_list("3 2\n0 1").unwrap_err(),
            ParseError::EdgeCountMismatch {
                expected: 2,
                found: 1
            }
        ));
        assert!(matches!(
            parse_edge_list("3 1\n0 1 2").unwrap_err(),
            ParseError::MalformedEdge { .. }
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_er(17, 0.3, 99);
        let h = parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn components_basic() {
        assert_eq!(connected_components(&Graph::edgeless(4)).0, 4);
        let k5 = gen_named(NamedGraph::Complete(5)).unwrap();
        assert_eq!(connected_components(&k5).0, 1);
        let u = disjoint_union(&[
            gen_named(NamedGraph::Cycle(6)).unwrap(),
            gen_named(NamedGraph::Cycle(3)).unwrap(),
            gen_named(NamedGraph::Cycle(3)).unwrap(),
        ]);
        assert_eq!(connected_components(&u).0, 3);
    }

    #[test]
    fn component_labels_consistent() {
        let g = parse_edge_list("5 2\n0 1\n3 4").unwrap();
        let (count, labels) = connected_components(&g);
        assert_eq!(count, 3);
        assert_eq!(labels, vec![0, 0, 1, 2, 2]);
    }

    #[test]
    fn induced_examples() {
        let k3 = gen_named(NamedGraph::Complete(3)).unwrap();
        let (sub, map) = induced_subgraph(&k3, &VertexSet::new(vec![0, 1]).unwrap()).unwrap();
        assert_eq!(sub, gen_named(NamedGraph::Complete(2)).unwrap());
        assert_eq!(map, vec![0, 1]);

        let (empty, _) = induced_subgraph(&k3, &VertexSet::new(vec![]).unwrap()).unwrap();
        assert_eq!(empty.n(), 0);

        // Path 0-1-2-3 restricted to {0, 2, 3}: one edge between the images
        // of 2 and 3, image of 0 isolated.
        let p4 = gen_named(NamedGraph::Path(4)).unwrap();
        let (sub, map) = induced_subgraph(&p4, &VertexSet::new(vec![0, 2, 3]).unwrap()).unwrap();
        assert_eq!(map, vec![0, 2, 3]);
        assert_eq!(sub.edge_count(), 1);
        assert!(sub.has_edge(1, 2));
        assert_eq!(sub.degree(0), 0);
    }

    #[test]
    fn induced_rejects_out_of_range() {
        let k3 = gen_named(NamedGraph::Complete(3)).unwrap();
        let err = induced_subgraph(&k3, &VertexSet::new(vec![0, 3]).unwrap()).unwrap_err();
        assert!(matches!(err, GraphError::VertexSetOutOfRange { vertex: 3, n: 3 }));
    }

    #[test]
    fn union_counts_add() {
        let u = disjoint_union(&[Graph::edgeless(1), Graph::edgeless(1)]);
        assert_eq!((u.n(), u.edge_count()), (2, 0));

        let copy = gen_er(100, 0.05, 3);
        let big = disjoint_union(&vec![copy.clone(); 200]);
        assert_eq!(big.n(), 20_000);
        assert_eq!(big.edge_count(), 200 * copy.edge_count());
        assert_eq!(
            connected_components(&big).0,
            200 * connected_components(&copy).0
        );
    }

    #[test]
    fn er_extremes_and_moments() {
        assert_eq!(gen_er(30, 0.0, 1).edge_count(), 0);
        assert_eq!(gen_er(10, 1.0, 1).edge_count(), 45);

        // Binomial edge count: mean C(2000,2) * 0.0005, allow 4 sigma.
        let g = gen_er(2000, 0.0005, 7);
        let pairs: f64 = 2000.0 * 1999.0 / 2.0;
        let mean = pairs * 0.0005;
        let sd = (pairs * 0.0005 * 0.9995).sqrt();
        let got = g.edge_count() as f64;
        assert!((got - mean).abs() < 4.0 * sd, "edge count {got} vs mean {mean}");

        // Reproducibility.
        assert_eq!(gen_er(50, 0.2, 11), gen_er(50, 0.2, 11));
        assert_ne!(gen_er(50, 0.2, 11), gen_er(50, 0.2, 12));
    }

    #[test]
    fn named_examples() {
        let s6 = gen_named(NamedGraph::Star(6)).unwrap();
        assert_eq!((s6.n(), s6.edge_count(), s6.max_degree()), (7, 6, 6));
        let c6 = gen_named(NamedGraph::Cycle(6)).unwrap();
        assert_eq!((c6.edge_count(), connected_components(&c6).0), (6, 1));
        let p1 = gen_named(NamedGraph::Path(1)).unwrap();
        assert_eq!((p1.n(), p1.edge_count()), (1, 0));
        assert!(gen_named(NamedGraph::Cycle(2)).is_err());
        assert!(gen_named(NamedGraph::Complete(0)).is_err());
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        for seed in 0..5 {
            let g = gen_er(40, 0.15, seed);
            let sum: usize = (0..g.n() as u32).map(|v| g.degree(v)).sum();
            assert_eq!(sum, 2 * g.edge_count());
        }
    }
}
