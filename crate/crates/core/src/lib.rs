//! Estimation of the number of connected components of a large graph from
//! a randomly vertex-sampled induced subgraph.
//!
//! The crate provides:
//!
//! - [`graph`]: a compact undirected-graph type with edge-list IO, an exact
//!   connectivity oracle and seeded generators;
//! - [`chordal`]: maximum cardinality search, perfect elimination orderings,
//!   clique counting and fill-in triangulation;
//! - [`sampling`]: Bernoulli and uniform vertex-sampling models;
//! - [`estimators`]: the component-count estimators (unbiased,
//!   soft-truncated, union-of-cliques, uniform-design, forest, and the
//!   triangulate-then-estimate heuristic for non-chordal data);
//! - [`oracle`]: brute-force ground truth at small scale: exact sampling
//!   distributions, estimator moments, induced-subgraph counting,
//!   isomorphism and total variation;
//! - [`lowerbounds`]: generators for adversarial graph pairs whose sampled
//!   distributions are provably close, plus the analytic indistinguishability
//!   bounds they satisfy;
//! - [`harness`]: seeded Monte Carlo evaluation sweeps with CSV output and
//!   the self-check suites the CLI exposes.
//!
//! Every randomized operation takes an explicit 64-bit seed and uses the
//! same ChaCha-based generator, so all experiments are bit-reproducible.

pub mod chordal;
pub mod estimators;
pub mod graph;
pub mod harness;
pub mod lowerbounds;
pub mod oracle;
pub mod sampling;

pub use chordal::{
    alternating_cc, clique_counts, clique_number, mcs_peo, mcs_peo_seeded, sandwich_bounds,
    triangulate, NotChordal, Peo,
};
pub use estimators::{
    estimate, estimate_cliques_smoothed, estimate_cliques_unbiased, estimate_forest,
    estimate_nonchordal, estimate_smoothed_chordal, estimate_unbiased_chordal, estimate_uniform,
    poisson_tail, EstimateError, EstimatorKind, Lambda,
};
pub use graph::{
    connected_components, disjoint_union, gen_er, gen_named, induced_subgraph, parse_edge_list,
    Graph, GraphError, NamedGraph, ParseError, VertexSet,
};
pub use sampling::{
    bernoulli_sample, trial_seed, uniform_sample, SampleModel, SampleSpec, SampledGraph,
};
