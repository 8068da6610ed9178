// Python bindings: the pymethods macro expansion trips useless_conversion
// on every PyResult under current clippy.
#![allow(clippy::useless_conversion)]

//! Python bindings for the component-count estimation library: the graph
//! and sampled-graph types plus the generators, chordal machinery,
//! estimators, oracle checks and pair constructions.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ccsample_core::chordal;
use ccsample_core::estimators;
use ccsample_core::graph::{self, Graph, NamedGraph, VertexSet};
use ccsample_core::harness;
use ccsample_core::lowerbounds;
use ccsample_core::oracle;
use ccsample_core::sampling::{self, SampleModel, SampledGraph};

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// Undirected simple graph on vertices `0..n-1`.
#[pyclass(frozen, name = "Graph")]
struct PyGraph {
    inner: Graph,
}

#[pymethods]
impl PyGraph {
    /// Parse the edge-list text format (`N M` header, then `u v` lines).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: graph::parse_edge_list(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        Ok(PyGraph {
            inner: Graph::from_edges(n, edges).map_err(value_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().collect()
    }

    fn neighbors(&self, v: u32) -> PyResult<Vec<u32>> {
        if v as usize >= self.inner.n() {
            return Err(value_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    /// Exact component count and per-vertex labels.
    fn connected_components(&self) -> (usize, Vec<u32>) {
        graph::connected_components(&self.inner)
    }

    fn induced_subgraph(&self, vertices: Vec<u32>) -> PyResult<(PyGraph, Vec<u32>)> {
        let set = VertexSet::from_unsorted(vertices).map_err(value_err)?;
        let (sub, map) = graph::induced_subgraph(&self.inner, &set).map_err(value_err)?;
        Ok((PyGraph { inner: sub }, map))
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, e={})", self.inner.n(), self.inner.edge_count())
    }
}

/// A sampled vertex set with its induced subgraph and the sampling spec.
#[pyclass(frozen, name = "SampledGraph")]
struct PySampledGraph {
    inner: SampledGraph,
}

#[pymethods]
impl PySampledGraph {
    #[getter]
    fn graph(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.graph.clone(),
        }
    }

    #[getter]
    fn sampled(&self) -> Vec<u32> {
        self.inner.sampled.members().to_vec()
    }

    #[getter]
    fn parent_n(&self) -> usize {
        self.inner.parent_n
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.spec.seed
    }

    /// ("bernoulli", p) or ("uniform", n).
    #[getter]
    fn model(&self, py: Python<'_>) -> PyObject {
        match self.inner.spec.model {
            SampleModel::Bernoulli(p) => ("bernoulli", p).into_py(py),
            SampleModel::Uniform(n) => ("uniform", n).into_py(py),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "SampledGraph(parent_n={}, n_sampled={})",
            self.inner.parent_n,
            self.inner.sampled.len()
        )
    }
}

#[pyfunction]
fn gen_er(n: usize, delta: f64, seed: u64) -> PyResult<PyGraph> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(value_err("delta must be in [0, 1]"));
    }
    Ok(PyGraph {
        inner: graph::gen_er(n, delta, seed),
    })
}

/// kind: "complete" | "path" | "cycle" | "star".
#[pyfunction]
fn gen_named(kind: &str, k: usize) -> PyResult<PyGraph> {
    let named = match kind {
        "complete" => NamedGraph::Complete(k),
        "path" => NamedGraph::Path(k),
        "cycle" => NamedGraph::Cycle(k),
        "star" => NamedGraph::Star(k),
        _ => return Err(value_err(format!("unknown named graph kind {kind:?}"))),
    };
    Ok(PyGraph {
        inner: graph::gen_named(named).map_err(value_err)?,
    })
}

#[pyfunction]
fn disjoint_union(py: Python<'_>, graphs: Vec<Py<PyGraph>>) -> PyGraph {
    let inner: Vec<Graph> = graphs
        .iter()
        .map(|g| g.borrow(py).inner.clone())
        .collect();
    PyGraph {
        inner: graph::disjoint_union(&inner),
    }
}

#[pyfunction]
fn triangulate(g: &PyGraph) -> PyGraph {
    PyGraph {
        inner: chordal::triangulate(&g.inner),
    }
}

#[pyfunction]
fn is_chordal(g: &PyGraph) -> bool {
    chordal::mcs_peo(&g.inner).is_ok()
}

/// Perfect elimination ordering and earlier-neighbor counts; raises if the
/// graph is not chordal.
#[pyfunction]
fn peo(g: &PyGraph) -> PyResult<(Vec<u32>, Vec<u32>)> {
    let peo = chordal::mcs_peo(&g.inner).map_err(value_err)?;
    Ok((peo.order().to_vec(), peo.c_values().to_vec()))
}

/// Clique counts by size: entry i is the number of cliques on i+1 vertices.
#[pyfunction]
fn clique_counts(g: &PyGraph) -> PyResult<Vec<u128>> {
    let peo = chordal::mcs_peo(&g.inner).map_err(value_err)?;
    chordal::clique_counts(&peo).map_err(value_err)
}

#[pyfunction]
fn alternating_cc(counts: Vec<u128>) -> i128 {
    chordal::alternating_cc(&counts)
}

#[pyfunction]
fn sandwich_bounds(counts: Vec<u128>, r: usize) -> PyResult<(i128, i128)> {
    if r < 1 {
        return Err(value_err("r must be at least 1"));
    }
    Ok(chordal::sandwich_bounds(&counts, r))
}

#[pyfunction]
fn bernoulli_sample(g: &PyGraph, p: f64, seed: u64) -> PyResult<PySampledGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(value_err("p must be in [0, 1]"));
    }
    Ok(PySampledGraph {
        inner: sampling::bernoulli_sample(&g.inner, p, seed),
    })
}

#[pyfunction]
fn uniform_sample(g: &PyGraph, n: usize, seed: u64) -> PyResult<PySampledGraph> {
    Ok(PySampledGraph {
        inner: sampling::uniform_sample(&g.inner, n, seed).map_err(value_err)?,
    })
}

fn kind_from_args(
    estimator: &str,
    lam: Option<&str>,
    d: Option<usize>,
    omega: Option<usize>,
    heuristic: bool,
) -> PyResult<estimators::EstimatorKind> {
    harness::build_estimator_kind(estimator, lam, d, omega, heuristic).map_err(value_err)
}

/// Estimate the parent's component count from one sample.
///
/// estimator: "unbiased" | "smoothed" | "cliques" | "cliques-smoothed" |
/// "uniform" | "forest"; lam: "auto" | "plogn" | a float rendered as text.
#[pyfunction]
#[pyo3(signature = (sg, estimator="unbiased", lam=None, d=None, omega=None, heuristic=false))]
fn estimate(
    sg: &PySampledGraph,
    estimator: &str,
    lam: Option<&str>,
    d: Option<usize>,
    omega: Option<usize>,
    heuristic: bool,
) -> PyResult<f64> {
    let kind = kind_from_args(estimator, lam, d, omega, heuristic)?;
    let p = match sg.inner.spec.model {
        SampleModel::Bernoulli(p) => p,
        SampleModel::Uniform(n) => n as f64 / sg.inner.parent_n.max(1) as f64,
    };
    estimators::estimate(&kind, &sg.inner, p).map_err(value_err)
}

#[pyfunction]
fn poisson_tail(lam: f64, k: u32) -> PyResult<f64> {
    if !(lam >= 0.0 && lam.is_finite()) {
        return Err(value_err("lambda must be finite and nonnegative"));
    }
    Ok(estimators::poisson_tail(lam, k))
}

/// Exact estimator moments (mean, variance, mse) under independent
/// sampling, by full subset enumeration (parent must be small).
#[pyfunction]
#[pyo3(signature = (g, p, estimator="unbiased", lam=None, d=None, omega=None, heuristic=false))]
#[allow(clippy::too_many_arguments)]
fn enumerate_moments(
    g: &PyGraph,
    p: f64,
    estimator: &str,
    lam: Option<&str>,
    d: Option<usize>,
    omega: Option<usize>,
    heuristic: bool,
) -> PyResult<(f64, f64, f64)> {
    let kind = kind_from_args(estimator, lam, d, omega, heuristic)?;
    let m = oracle::enumerate_moments(&g.inner, p, &kind).map_err(value_err)?;
    Ok((m.mean, m.variance, m.mse_vs_cc))
}

#[pyfunction]
fn count_induced(pattern: &PyGraph, host: &PyGraph) -> PyResult<u64> {
    oracle::count_induced(&pattern.inner, &host.inner).map_err(value_err)
}

#[pyfunction]
fn are_isomorphic(g: &PyGraph, h: &PyGraph) -> PyResult<bool> {
    oracle::are_isomorphic(&g.inner, &h.inner).map_err(value_err)
}

/// Exact total variation distance between the sampled-graph distributions
/// of two equal-size parents.
#[pyfunction]
fn exact_tv(h: &PyGraph, h2: &PyGraph, p: f64) -> PyResult<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(value_err("p must be in [0, 1]"));
    }
    oracle::exact_tv(&h.inner, &h2.inner, p).map_err(value_err)
}

fn pair_to_py(pair: lowerbounds::GraphPair) -> (PyGraph, PyGraph, usize) {
    let diff = pair.meta.cc_diff();
    (
        PyGraph { inner: pair.h },
        PyGraph { inner: pair.h2 },
        diff,
    )
}

/// Adversarial pair constructions; each returns (h, h2, cc_difference).
#[pyfunction]
fn gen_cycle_pair(r: usize) -> PyResult<(PyGraph, PyGraph, usize)> {
    Ok(pair_to_py(lowerbounds::gen_cycle_pair(r).map_err(value_err)?))
}

#[pyfunction]
fn gen_chordal_pair_parity(omega: usize, m: usize) -> PyResult<(PyGraph, PyGraph, usize)> {
    Ok(pair_to_py(
        lowerbounds::gen_chordal_pair_parity(omega, m).map_err(value_err)?,
    ))
}

#[pyfunction]
fn gen_clique_pair(omega: usize) -> PyResult<(PyGraph, PyGraph, usize)> {
    Ok(pair_to_py(
        lowerbounds::gen_clique_pair(omega).map_err(value_err)?,
    ))
}

#[pyfunction]
fn gen_star_pair(d: usize) -> PyResult<(PyGraph, PyGraph, usize)> {
    Ok(pair_to_py(lowerbounds::gen_star_pair(d).map_err(value_err)?))
}

#[pyfunction]
fn tv_bound_matching(m: usize, k: usize, p: f64) -> PyResult<(f64, f64)> {
    if k > m || !(0.0..=1.0).contains(&p) {
        return Err(value_err("need k <= m and p in [0, 1]"));
    }
    Ok(lowerbounds::tv_bound_matching(m, k, p))
}

#[pyfunction]
fn tv_bound_coupling(u_size: usize, v_size: usize, p: f64, shared_u: bool) -> PyResult<f64> {
    if u_size > v_size || !(0.0..=1.0).contains(&p) {
        return Err(value_err("need u_size <= v_size and p in [0, 1]"));
    }
    Ok(lowerbounds::tv_bound_coupling(u_size, v_size, p, shared_u))
}

#[pyfunction]
fn mainlb_delta(f_h: f64, f_h2: f64, n: u64, m: u64, tv: f64) -> PyResult<f64> {
    if m == 0 {
        return Err(value_err("m must be positive"));
    }
    Ok(lowerbounds::mainlb_delta(f_h, f_h2, n, m, tv))
}

/// Monte Carlo sweep: for each p runs `trials` seeded samples and returns
/// rows (p, mean_rel_error, sd_rel_error, mean_estimate).
#[pyfunction]
#[pyo3(signature = (g, p_grid, trials, seed, estimator="unbiased", lam=None, d=None, omega=None, heuristic=false))]
#[allow(clippy::too_many_arguments)]
fn eval_sweep(
    g: &PyGraph,
    p_grid: Vec<f64>,
    trials: usize,
    seed: u64,
    estimator: &str,
    lam: Option<&str>,
    d: Option<usize>,
    omega: Option<usize>,
    heuristic: bool,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let kind = kind_from_args(estimator, lam, d, omega, heuristic)?;
    let report =
        harness::run_eval(&g.inner, &kind, &p_grid, trials, seed).map_err(value_err)?;
    Ok(report
        .summary
        .iter()
        .map(|row| (row.p, row.mean_rel_error, row.sd_rel_error, row.mean_estimate))
        .collect())
}

#[pymodule]
fn ccsample_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PySampledGraph>()?;
    m.add_function(wrap_pyfunction!(gen_er, m)?)?;
    m.add_function(wrap_pyfunction!(gen_named, m)?)?;
    m.add_function(wrap_pyfunction!(disjoint_union, m)?)?;
    m.add_function(wrap_pyfunction!(triangulate, m)?)?;
    m.add_function(wrap_pyfunction!(is_chordal, m)?)?;
    m.add_function(wrap_pyfunction!(peo, m)?)?;
    m.add_function(wrap_pyfunction!(clique_counts, m)?)?;
    m.add_function(wrap_pyfunction!(alternating_cc, m)?)?;
    m.add_function(wrap_pyfunction!(sandwich_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_sample, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_sample, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_tail, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_moments, m)?)?;
    m.add_function(wrap_pyfunction!(count_induced, m)?)?;
    m.add_function(wrap_pyfunction!(are_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(exact_tv, m)?)?;
    m.add_function(wrap_pyfunction!(gen_cycle_pair, m)?)?;
    m.add_function(wrap_pyfunction!(gen_chordal_pair_parity, m)?)?;
    m.add_function(wrap_pyfunction!(gen_clique_pair, m)?)?;
    m.add_function(wrap_pyfunction!(gen_star_pair, m)?)?;
    m.add_function(wrap_pyfunction!(tv_bound_matching, m)?)?;
    m.add_function(wrap_pyfunction!(tv_bound_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(mainlb_delta, m)?)?;
    m.add_function(wrap_pyfunction!(eval_sweep, m)?)?;
    Ok(())
}
