//! Vertex-sampling models: independent (Bernoulli) inclusion and uniform
//! fixed-size subsets. A sample carries its spec and the parent's vertex
//! count, so downstream estimators never touch the parent graph itself.

use rand::Rng;
use thiserror::Error;

use crate::graph::{induced_subgraph, rng_from_seed, Graph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleModel {
    /// Each vertex is kept independently with this probability.
    Bernoulli(f64),
    /// Exactly this many vertices, uniformly without replacement.
    Uniform(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub model: SampleModel,
    pub seed: u64,
}

/// A sampled vertex set together with its induced subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGraph {
    pub parent_n: usize,
    pub spec: SampleSpec,
    pub sampled: VertexSet,
    pub graph: Graph,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SampleError {
    #[error("cannot sample {requested} of {available} vertices")]
    SampleTooLarge { requested: usize, available: usize },
}

/// Derived seed for the `index`-th trial of a sweep. Documented so sweeps
/// can be parallelized and still reproduced exactly.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    base_seed.wrapping_add(index)
}

fn assemble(g: &Graph, members: Vec<u32>, spec: SampleSpec) -> SampledGraph {
    let sampled = VertexSet::new(members).expect("sampled members are sorted and unique");
    let (graph, _) = induced_subgraph(g, &sampled).expect("sampled set is in range");
    SampledGraph {
        parent_n: g.n(),
        spec,
        sampled,
        graph,
    }
}

/// Keeps each vertex independently with probability `p`; deterministic for
/// a fixed seed.
pub fn bernoulli_sample(g: &Graph, p: f64, seed: u64) -> SampledGraph {
    assert!((0.0..=1.0).contains(&p), "p must be in [0, 1]");
    let mut rng = rng_from_seed(seed);
    let members: Vec<u32> = (0..g.n() as u32)
        .filter(|_| rng.gen::<f64>() < p)
        .collect();
    assemble(
        g,
        members,
        SampleSpec {
            model: SampleModel::Bernoulli(p),
            seed,
        },
    )
}

/// Uniformly random `n`-subset of the vertices, drawn by a seeded partial
/// Fisher-Yates shuffle.
pub fn uniform_sample(g: &Graph, n: usize, seed: u64) -> Result<SampledGraph, SampleError> {
    let total = g.n();
    if n > total {
        return Err(SampleError::SampleTooLarge {
            requested: n,
            available: total,
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut pool: Vec<u32> = (0..total as u32).collect();
    for i in 0..n {
        let j = rng.gen_range(i..total);
        pool.swap(i, j);
    }
    let mut members: Vec<u32> = pool[..n].to_vec();
    members.sort_unstable();
    Ok(assemble(
        g,
        members,
        SampleSpec {
            model: SampleModel::Uniform(n),
            seed,
        },
    ))
}
