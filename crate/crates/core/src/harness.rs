//! Monte Carlo evaluation harness: seeded sampling sweeps over a grid of
//! sampling ratios, with per-trial and per-ratio CSV output, plus the
//! self-check suites exposed by the CLI.
//!
//! Reproducibility contract: the trial at global index `i` (rows ordered by
//! ratio, then trial) uses seed `base_seed + i`, so sweeps can run on any
//! number of workers and still produce identical bytes. `CC_SAMPLE_THREADS`
//! caps the worker count.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::chordal::{clique_number, mcs_peo, triangulate};
use crate::estimators::{estimate, EstimateError, EstimatorKind, Lambda};
use crate::graph::{
    connected_components, disjoint_union, gen_er, gen_named, parse_edge_list, Graph, NamedGraph,
};
use crate::sampling::{bernoulli_sample, trial_seed};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("bad generator spec: {0}")]
    BadGeneratorSpec(String),
    #[error("bad estimator spec: {0}")]
    BadEstimatorSpec(String),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("parent graph must have at least one vertex")]
    EmptyParent,
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Parse(#[from] crate::graph::ParseError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

// ---------------------------------------------------------------------------
// Parent generator specs.
// ---------------------------------------------------------------------------

/// Textual recipe for a parent graph: `er <n> <delta>`,
/// `named <kind> <k>`, or `copies <count> <inner>` where the inner spec is
/// colon-separated (`er:100:0.2`). Each copy derives its own seed.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Er { n: usize, delta: f64 },
    Named(NamedGraph),
    Copies { count: usize, inner: Box<GeneratorSpec> },
}

impl GeneratorSpec {
    pub fn parse(tokens: &[&str]) -> Result<GeneratorSpec, HarnessError> {
        let bad = || HarnessError::BadGeneratorSpec(tokens.join(" "));
        match tokens {
            ["er", n, delta] => {
                let n = n.parse().map_err(|_| bad())?;
                let delta: f64 = delta.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&delta) {
                    return Err(bad());
                }
                Ok(GeneratorSpec::Er { n, delta })
            }
            ["named", kind, k] => {
                let k: usize = k.parse().map_err(|_| bad())?;
                let named = match *kind {
                    "complete" => NamedGraph::Complete(k),
                    "path" => NamedGraph::Path(k),
                    "cycle" => NamedGraph::Cycle(k),
                    "star" => NamedGraph::Star(k),
                    _ => return Err(bad()),
                };
                Ok(GeneratorSpec::Named(named))
            }
            ["copies", count, inner] => {
                let count = count.parse().map_err(|_| bad())?;
                let inner_tokens: Vec<&str> = inner.split(':').collect();
                let inner = GeneratorSpec::parse(&inner_tokens)?;
                Ok(GeneratorSpec::Copies {
                    count,
                    inner: Box::new(inner),
                })
            }
            _ => Err(bad()),
        }
    }

    /// Builds the graph, deterministically in `seed`.
    pub fn build(&self, seed: u64) -> Result<Graph, HarnessError> {
        match self {
            GeneratorSpec::Er { n, delta } => Ok(gen_er(*n, *delta, seed)),
            GeneratorSpec::Named(kind) => Ok(gen_named(*kind)?),
            GeneratorSpec::Copies { count, inner } => {
                let copies: Result<Vec<Graph>, HarnessError> = (0..*count)
                    .map(|i| inner.build(trial_seed(seed, i as u64)))
                    .collect();
                Ok(disjoint_union(&copies?))
            }
        }
    }
}

/// Where the parent graph comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ParentSource {
    File(PathBuf),
    Generator(GeneratorSpec),
}

impl ParentSource {
    pub fn parse(value: &str) -> Result<ParentSource, HarnessError> {
        let tokens: Vec<&str> = value.split_whitespace().collect();
        match tokens.as_slice() {
            ["file", path] => Ok(ParentSource::File(PathBuf::from(path))),
            toks => Ok(ParentSource::Generator(GeneratorSpec::parse(toks)?)),
        }
    }

    pub fn load(&self, seed: u64) -> Result<Graph, HarnessError> {
        match self {
            ParentSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                    path: path.clone(),
                    source,
                })?;
                Ok(parse_edge_list(&text)?)
            }
            ParentSource::Generator(spec) => spec.build(seed),
        }
    }
}

// ---------------------------------------------------------------------------
// Estimator specs.
// ---------------------------------------------------------------------------

/// Assembles an [`EstimatorKind`] from CLI/config fragments.
pub fn build_estimator_kind(
    name: &str,
    lambda: Option<&str>,
    d: Option<usize>,
    omega: Option<usize>,
    heuristic: bool,
) -> Result<EstimatorKind, HarnessError> {
    let lambda_choice = |cliques: bool| -> Result<Lambda, HarnessError> {
        match lambda.unwrap_or("auto") {
            "auto" => {
                if cliques {
                    // The union-of-cliques auto rule needs no parent
                    // assumptions beyond N.
                    Ok(Lambda::Auto { d: 1, omega: 2 })
                } else {
                    let (Some(d), Some(omega)) = (d, omega) else {
                        return Err(HarnessError::BadEstimatorSpec(
                            "auto smoothing needs --d and --omega".into(),
                        ));
                    };
                    Ok(Lambda::Auto { d, omega })
                }
            }
            "plogn" => Ok(Lambda::PLogN),
            value => {
                let fixed: f64 = value.parse().map_err(|_| {
                    HarnessError::BadEstimatorSpec(format!("bad lambda {value:?}"))
                })?;
                Ok(Lambda::Fixed(fixed))
            }
        }
    };
    let base = match name {
        "unbiased" | "unbiased-chordal" => EstimatorKind::UnbiasedChordal,
        "smoothed" | "smoothed-chordal" => EstimatorKind::SmoothedChordal(lambda_choice(false)?),
        "cliques" | "cliques-unbiased" => EstimatorKind::CliquesUnbiased,
        "cliques-smoothed" => EstimatorKind::CliquesSmoothed(lambda_choice(true)?),
        "uniform" | "uniform-unbiased" => EstimatorKind::UniformUnbiased,
        "forest" => EstimatorKind::Forest,
        other => {
            return Err(HarnessError::BadEstimatorSpec(format!(
                "unknown estimator {other:?}"
            )))
        }
    };
    if heuristic {
        Ok(EstimatorKind::NonChordalHeuristic(Box::new(base)))
    } else {
        Ok(base)
    }
}

pub fn estimator_name(kind: &EstimatorKind) -> String {
    match kind {
        EstimatorKind::UnbiasedChordal => "unbiased-chordal".into(),
        EstimatorKind::SmoothedChordal(_) => "smoothed-chordal".into(),
        EstimatorKind::CliquesUnbiased => "cliques-unbiased".into(),
        EstimatorKind::CliquesSmoothed(_) => "cliques-smoothed".into(),
        EstimatorKind::UniformUnbiased => "uniform-unbiased".into(),
        EstimatorKind::Forest => "forest".into(),
        EstimatorKind::NonChordalHeuristic(inner) => {
            format!("triangulate+{}", estimator_name(inner))
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation config and report.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub parent: ParentSource,
    pub parent_seed: u64,
    pub triangulate_parent: bool,
    pub estimator: EstimatorKind,
    pub p_grid: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub out_trials: Option<PathBuf>,
    pub out_summary: Option<PathBuf>,
}

impl EvalConfig {
    /// Parses the key-value config format: one `key = value` per line,
    /// `#` comments. Required keys: `parent`, `estimator`, `p`, `trials`,
    /// `seed`.
    pub fn parse(text: &str) -> Result<EvalConfig, HarnessError> {
        let mut kv: std::collections::HashMap<String, String> = std::collections::HashMap::new();
        for raw in text.lines() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(HarnessError::BadConfig(format!(
                    "expected `key = value`, got {line:?}"
                )));
            };
            kv.insert(key.trim().to_string(), value.trim().to_string());
        }
        let require = |key: &str| {
            kv.get(key)
                .cloned()
                .ok_or_else(|| HarnessError::BadConfig(format!("missing key {key:?}")))
        };
        let parent = ParentSource::parse(&require("parent")?)?;
        let parent_seed = match kv.get("parent_seed") {
            Some(v) => v
                .parse()
                .map_err(|_| HarnessError::BadConfig("bad parent_seed".into()))?,
            None => 0,
        };
        let triangulate_parent = match kv.get("triangulate").map(String::as_str) {
            Some("true") => true,
            Some("false") | None => false,
            Some(other) => {
                return Err(HarnessError::BadConfig(format!(
                    "triangulate must be true or false, got {other:?}"
                )))
            }
        };
        let heuristic = match kv.get("heuristic").map(String::as_str) {
            Some("true") => true,
            Some("false") | None => false,
            Some(other) => {
                return Err(HarnessError::BadConfig(format!(
                    "heuristic must be true or false, got {other:?}"
                )))
            }
        };
        let estimator = build_estimator_kind(
            &require("estimator")?,
            kv.get("lambda").map(String::as_str),
            kv.get("d")
                .map(|v| v.parse())
                .transpose()
                .map_err(|_| HarnessError::BadConfig("bad d".into()))?,
            kv.get("omega")
                .map(|v| v.parse())
                .transpose()
                .map_err(|_| HarnessError::BadConfig("bad omega".into()))?,
            heuristic,
        )?;
        let p_grid: Vec<f64> = require("p")?
            .split([',', ' '])
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| HarnessError::BadConfig(format!("bad p value {s:?}")))
            })
            .collect::<Result<_, _>>()?;
        if p_grid.is_empty() || p_grid.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(HarnessError::BadConfig(
                "p values must lie in (0, 1]".into(),
            ));
        }
        let trials: usize = require("trials")?
            .parse()
            .map_err(|_| HarnessError::BadConfig("bad trials".into()))?;
        if trials < 1 {
            return Err(HarnessError::BadConfig("trials must be >= 1".into()));
        }
        let base_seed: u64 = require("seed")?
            .parse()
            .map_err(|_| HarnessError::BadConfig("bad seed".into()))?;
        Ok(EvalConfig {
            parent,
            parent_seed,
            triangulate_parent,
            estimator,
            p_grid,
            trials,
            base_seed,
            out_trials: kv.get("out_trials").map(PathBuf::from),
            out_summary: kv.get("out_summary").map(PathBuf::from),
        })
    }

    pub fn load_parent(&self) -> Result<Graph, HarnessError> {
        let g = self.parent.load(self.parent_seed)?;
        Ok(if self.triangulate_parent {
            triangulate(&g)
        } else {
            g
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub p: f64,
    pub trial: usize,
    pub estimate: f64,
    pub true_cc: usize,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummaryRow {
    pub p: f64,
    pub mean_rel_error: f64,
    pub sd_rel_error: f64,
    pub mean_estimate: f64,
    pub true_cc: usize,
    pub n_trials: usize,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub estimator: String,
    pub base_seed: u64,
    pub artifact_version: String,
    pub config_echo: Option<String>,
    pub true_cc: usize,
    pub parent_n: usize,
    pub summary: Vec<EvalSummaryRow>,
    pub trials: Vec<EvalRow>,
    pub total_wall_ms: f64,
}

fn worker_count(rows: usize) -> usize {
    let default = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let capped = match std::env::var("CC_SAMPLE_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).unwrap_or(default),
        Err(_) => default,
    };
    capped.min(rows.max(1))
}

/// Runs `trials` independent sampling experiments at every ratio in
/// `p_grid`. Trials run concurrently; the trial at global row index `i`
/// uses seed `base_seed + i`, so results do not depend on scheduling.
pub fn run_eval(
    parent: &Graph,
    estimator: &EstimatorKind,
    p_grid: &[f64],
    trials: usize,
    base_seed: u64,
) -> Result<EvalReport, HarnessError> {
    if parent.n() == 0 {
        return Err(HarnessError::EmptyParent);
    }
    let started = Instant::now();
    let true_cc = connected_components(parent).0;
    let jobs: Vec<(usize, f64, usize)> = p_grid
        .iter()
        .enumerate()
        .flat_map(|(pi, &p)| (0..trials).map(move |t| (pi, p, t)))
        .collect();
    let workers = worker_count(jobs.len());
    let chunk = jobs.len().div_ceil(workers);

    type TrialOut = Result<(usize, EvalRow, f64), EstimateError>;
    let mut results: Vec<TrialOut> = Vec::with_capacity(jobs.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .chunks(chunk.max(1))
            .enumerate()
            .map(|(ci, slice)| {
                let estimator = estimator.clone();
                scope.spawn(move || {
                    slice
                        .iter()
                        .enumerate()
                        .map(|(offset, &(pi, p, trial))| {
                            let index = (ci * chunk + offset) as u64;
                            let seed = trial_seed(base_seed, index);
                            let t0 = Instant::now();
                            let sample = bernoulli_sample(parent, p, seed);
                            let est = estimate(&estimator, &sample, p)?;
                            let ms = t0.elapsed().as_secs_f64() * 1e3;
                            Ok((
                                pi,
                                EvalRow {
                                    p,
                                    trial,
                                    estimate: est,
                                    true_cc,
                                    rel_error: (est - true_cc as f64).abs() / true_cc as f64,
                                },
                                ms,
                            ))
                        })
                        .collect::<Vec<TrialOut>>()
                })
            })
            .collect();
        for handle in handles {
            results.extend(handle.join().expect("trial worker panicked"));
        }
    });

    let mut rows: Vec<EvalRow> = Vec::with_capacity(jobs.len());
    let mut wall_by_p = vec![0.0f64; p_grid.len()];
    for r in results {
        let (pi, row, ms) = r?;
        wall_by_p[pi] += ms;
        rows.push(row);
    }
    rows.sort_by(|a, b| {
        a.p.total_cmp(&b.p)
            .then(a.trial.cmp(&b.trial))
            .then(a.estimate.total_cmp(&b.estimate))
    });

    let mut summary = Vec::with_capacity(p_grid.len());
    for (pi, &p) in p_grid.iter().enumerate() {
        let block: Vec<&EvalRow> = rows.iter().filter(|r| r.p == p).collect();
        let n = block.len();
        let mean_rel = block.iter().map(|r| r.rel_error).sum::<f64>() / n as f64;
        let sd_rel = if n > 1 {
            (block
                .iter()
                .map(|r| (r.rel_error - mean_rel).powi(2))
                .sum::<f64>()
                / (n - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        let mean_est = block.iter().map(|r| r.estimate).sum::<f64>() / n as f64;
        summary.push(EvalSummaryRow {
            p,
            mean_rel_error: mean_rel,
            sd_rel_error: sd_rel,
            mean_estimate: mean_est,
            true_cc,
            n_trials: n,
            wall_time_ms: wall_by_p[pi],
        });
    }

    Ok(EvalReport {
        estimator: estimator_name(estimator),
        base_seed,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config_echo: None,
        true_cc,
        parent_n: parent.n(),
        summary,
        trials: rows,
        total_wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Per-trial CSV: columns `p,trial,estimate,true_cc,rel_error`, rows sorted
/// by (p, trial). Byte-identical across reruns with the same seed.
pub fn trials_csv(report: &EvalReport) -> String {
    let mut out = String::from("p,trial,estimate,true_cc,rel_error\n");
    for row in &report.trials {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.p, row.trial, row.estimate, row.true_cc, row.rel_error
        );
    }
    out
}

/// Summary CSV: columns `p,mean_rel_error,sd_rel_error,n_trials`.
pub fn summary_csv(report: &EvalReport) -> String {
    let mut out = String::from("p,mean_rel_error,sd_rel_error,n_trials\n");
    for row in &report.summary {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.p, row.mean_rel_error, row.sd_rel_error, row.n_trials
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Self-check suites.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifySuite {
    Unbiasedness,
    Variance,
    TvPairs,
    Matching,
    Peo,
    All,
}

impl VerifySuite {
    pub fn parse(name: &str) -> Option<VerifySuite> {
        Some(match name {
            "unbiasedness" => VerifySuite::Unbiasedness,
            "variance" => VerifySuite::Variance,
            "tv-pairs" => VerifySuite::TvPairs,
            "matching" => VerifySuite::Matching,
            "peo" => VerifySuite::Peo,
            "all" => VerifySuite::All,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn random_chordal(n: usize, density: f64, seed: u64) -> Graph {
    triangulate(&gen_er(n, density, seed))
}

fn verify_unbiasedness() -> Vec<CheckOutcome> {
    use crate::oracle::{enumerate_moments_exact, enumerate_moments_uniform_exact};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let mut out = Vec::new();
    let mut all_ok = true;
    let mut detail = String::new();
    for seed in 0..4u64 {
        let g = random_chordal(8 + (seed as usize % 3), 0.3, seed);
        let cc = BigRational::from_integer(BigInt::from(connected_components(&g).0));
        for (a, b) in [(1i64, 4i64), (1, 2)] {
            match enumerate_moments_exact(&g, a, b, &EstimatorKind::UnbiasedChordal) {
                Ok(m) if m.mean == cc => {}
                Ok(m) => {
                    all_ok = false;
                    let _ = write!(detail, "seed {seed} p={a}/{b}: mean {} != cc; ", m.mean);
                }
                Err(e) => {
                    all_ok = false;
                    let _ = write!(detail, "seed {seed}: {e}; ");
                }
            }
        }
    }
    out.push(check(
        "exact mean equals component count (chordal, independent sampling)",
        all_ok,
        detail,
    ));

    // Uniform design: unbiased once the sample size covers the largest
    // clique (smaller samples never observe the big cliques, whose terms
    // then drop from the alternating sum).
    let g = random_chordal(8, 0.3, 11);
    let cc = BigRational::from_integer(BigInt::from(connected_components(&g).0));
    let omega = clique_number(&mcs_peo(&g).unwrap());
    let ok = (omega..=8).all(|n_pick| {
        enumerate_moments_uniform_exact(&g, n_pick, &EstimatorKind::UniformUnbiased)
            .map(|m| m.mean == cc)
            .unwrap_or(false)
    });
    out.push(check(
        "exact mean equals component count (uniform design)",
        ok,
        String::new(),
    ));
    out
}

fn verify_variance() -> Vec<CheckOutcome> {
    use crate::oracle::{enumerate_moments, enumerate_moments_exact};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let mut out = Vec::new();

    // Exact variance identity for unions of cliques.
    let parent = disjoint_union(&[
        gen_named(NamedGraph::Complete(4)).unwrap(),
        gen_named(NamedGraph::Complete(2)).unwrap(),
        gen_named(NamedGraph::Complete(2)).unwrap(),
        Graph::edgeless(2),
    ]);
    let mut ok = true;
    let mut detail = String::new();
    for (a, b) in [(1i64, 4i64), (1, 2), (3, 4)] {
        let m = enumerate_moments_exact(&parent, a, b, &EstimatorKind::CliquesUnbiased).unwrap();
        let q_over_p = BigRational::new(BigInt::from(b - a), BigInt::from(a));
        // Size profile: one 4-clique, two 2-cliques, two singletons.
        let mut expect = BigRational::from_integer(BigInt::from(0));
        for (r, count) in [(4u32, 1i64), (2, 2), (1, 2)] {
            let mut pow = BigRational::from_integer(BigInt::from(1));
            for _ in 0..r {
                pow *= &q_over_p;
            }
            expect += pow * BigRational::from_integer(BigInt::from(count));
        }
        if m.variance != expect {
            ok = false;
            let _ = write!(detail, "p={a}/{b}: variance {} != {}; ", m.variance, expect);
        }
    }
    out.push(check(
        "union-of-cliques variance identity (exact)",
        ok,
        detail,
    ));

    // Variance bound for the unbiased chordal estimator.
    let mut ok = true;
    let mut detail = String::new();
    for seed in 0..5u64 {
        let g = random_chordal(9, 0.3, 100 + seed);
        let peo = mcs_peo(&g).unwrap();
        let omega = clique_number(&peo);
        let d = g.max_degree();
        for p in [0.25, 0.5, 0.75] {
            let m = enumerate_moments(&g, p, &EstimatorKind::UnbiasedChordal).unwrap();
            let bound =
                g.n() as f64 / p.powi(omega as i32) + (g.n() * d) as f64 / p.powi(omega as i32 - 1);
            if m.variance > bound + 1e-9 {
                ok = false;
                let _ = write!(detail, "seed {seed} p={p}: {} > {bound}; ", m.variance);
            }
        }
    }
    out.push(check("chordal variance bound", ok, detail));
    out
}

fn verify_tv_pairs() -> Vec<CheckOutcome> {
    use crate::lowerbounds::{
        gen_chordal_pair_parity, gen_cycle_pair, gen_star_pair, tv_bound_coupling,
        tv_bound_matching,
    };
    use crate::oracle::{exact_tv_from_classes, isomorphism_class_counts};
    let ps = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let mut out = Vec::new();

    let star = gen_star_pair(6).unwrap();
    let c1 = isomorphism_class_counts(&star.h).unwrap();
    let c2 = isomorphism_class_counts(&star.h2).unwrap();
    let ok = ps.iter().all(|&p| {
        let tv = exact_tv_from_classes(&c1, &c2, p);
        (tv - p * (1.0 - (1.0 - p).powi(6))).abs() < 1e-12
    });
    out.push(check("star pair distance formula", ok, String::new()));

    let cyc = gen_cycle_pair(5).unwrap();
    let c1 = isomorphism_class_counts(&cyc.h).unwrap();
    let c2 = isomorphism_class_counts(&cyc.h2).unwrap();
    let ok = ps.iter().all(|&p| {
        let tv = exact_tv_from_classes(&c1, &c2, p);
        tv <= tv_bound_matching(8, 4, p).0 + 1e-12
    });
    out.push(check("cycle pair within matching bound", ok, String::new()));

    let par = gen_chordal_pair_parity(3, 3).unwrap();
    let c1 = isomorphism_class_counts(&par.h).unwrap();
    let c2 = isomorphism_class_counts(&par.h2).unwrap();
    let ok = ps.iter().all(|&p| {
        let tv = exact_tv_from_classes(&c1, &c2, p);
        tv <= tv_bound_coupling(2, 8, p, true) + 1e-12
    });
    out.push(check("parity pair within coupling bound", ok, String::new()));
    out
}

fn verify_matching() -> Vec<CheckOutcome> {
    use crate::lowerbounds::{gen_clique_pair, gen_cycle_pair};
    use crate::oracle::{connected_graph_catalogue, count_induced};
    let mut out = Vec::new();

    let mut ok = true;
    let mut detail = String::new();
    for r in [4usize, 5] {
        let pair = gen_cycle_pair(r).unwrap();
        let catalogue = connected_graph_catalogue(r - 1).unwrap();
        for h in &catalogue {
            let a = count_induced(h, &pair.h).unwrap();
            let b = count_induced(h, &pair.h2).unwrap();
            if a != b {
                ok = false;
                let _ = write!(detail, "r={r}: pattern with {} vertices differs; ", h.n());
            }
        }
    }
    out.push(check(
        "cycle pair matches all connected subgraph counts",
        ok,
        detail,
    ));

    let mut ok = true;
    for omega in [3usize, 4] {
        let pair = gen_clique_pair(omega).unwrap();
        for i in 1..omega {
            let ki = gen_named(NamedGraph::Complete(i)).unwrap();
            if count_induced(&ki, &pair.h).unwrap() != count_induced(&ki, &pair.h2).unwrap() {
                ok = false;
            }
        }
    }
    out.push(check("clique pair matches clique counts", ok, String::new()));
    out
}

fn verify_peo() -> Vec<CheckOutcome> {
    use crate::chordal::{alternating_cc, clique_counts};
    use crate::oracle::count_induced;
    let mut out = Vec::new();

    // Chordality verdict against the induced-cycle oracle.
    let mut ok = true;
    let mut detail = String::new();
    for seed in 0..60u64 {
        let g = gen_er(8, 0.25 + (seed % 3) as f64 * 0.15, seed);
        let has_long_cycle = (4..=8).any(|k| {
            let ck = gen_named(NamedGraph::Cycle(k)).unwrap();
            count_induced(&ck, &g).unwrap() > 0
        });
        if mcs_peo(&g).is_ok() != !has_long_cycle {
            ok = false;
            let _ = write!(detail, "seed {seed} disagrees; ");
        }
    }
    out.push(check(
        "chordality matches induced-cycle search",
        ok,
        detail,
    ));

    // Alternating clique-count identity on triangulated graphs.
    let mut ok = true;
    for seed in 0..40u64 {
        let g = random_chordal(12, 0.25, 1000 + seed);
        let counts = clique_counts(&mcs_peo(&g).unwrap()).unwrap();
        if alternating_cc(&counts) != connected_components(&g).0 as i128 {
            ok = false;
        }
    }
    out.push(check("alternating clique-count identity", ok, String::new()));
    out
}

/// Runs one (or all) of the oracle-backed self-check suites.
pub fn run_verify(suite: VerifySuite) -> Vec<CheckOutcome> {
    match suite {
        VerifySuite::Unbiasedness => verify_unbiasedness(),
        VerifySuite::Variance => verify_variance(),
        VerifySuite::TvPairs => verify_tv_pairs(),
        VerifySuite::Matching => verify_matching(),
        VerifySuite::Peo => verify_peo(),
        VerifySuite::All => {
            let mut out = Vec::new();
            out.extend(verify_unbiasedness());
            out.extend(verify_variance());
            out.extend(verify_tv_pairs());
            out.extend(verify_matching());
            out.extend(verify_peo());
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_specs_round_trip() {
        let spec = GeneratorSpec::parse(&["er", "50", "0.1"]).unwrap();
        let g = spec.build(3).unwrap();
        assert_eq!(g.n(), 50);
        assert_eq!(g, spec.build(3).unwrap());

        let spec = GeneratorSpec::parse(&["copies", "4", "er:10:0.3"]).unwrap();
        let g = spec.build(9).unwrap();
        assert_eq!(g.n(), 40);

        let spec = GeneratorSpec::parse(&["named", "star", "6"]).unwrap();
        assert_eq!(spec.build(0).unwrap().n(), 7);

        assert!(GeneratorSpec::parse(&["er", "x", "0.1"]).is_err());
        assert!(GeneratorSpec::parse(&["wat", "1"]).is_err());
        assert!(GeneratorSpec::parse(&["er", "10", "1.5"]).is_err());
    }

    #[test]
    fn estimator_specs() {
        assert_eq!(
            build_estimator_kind("unbiased", None, None, None, false).unwrap(),
            EstimatorKind::UnbiasedChordal
        );
        assert_eq!(
            build_estimator_kind("smoothed", Some("plogn"), None, None, false).unwrap(),
            EstimatorKind::SmoothedChordal(Lambda::PLogN)
        );
        assert_eq!(
            build_estimator_kind("smoothed", Some("auto"), Some(8), Some(4), false).unwrap(),
            EstimatorKind::SmoothedChordal(Lambda::Auto { d: 8, omega: 4 })
        );
        assert!(build_estimator_kind("smoothed", Some("auto"), None, None, false).is_err());
        assert_eq!(
            build_estimator_kind("forest", None, None, None, true).unwrap(),
            EstimatorKind::NonChordalHeuristic(Box::new(EstimatorKind::Forest))
        );
        assert!(build_estimator_kind("nope", None, None, None, false).is_err());
        assert_eq!(
            build_estimator_kind("smoothed", Some("1.25"), None, None, false).unwrap(),
            EstimatorKind::SmoothedChordal(Lambda::Fixed(1.25))
        );
    }

    #[test]
    fn config_parsing() {
        let text = "\
# simulation protocol
parent = copies 3 er:20:0.1
parent_seed = 5
triangulate = true
estimator = unbiased
p = 0.2, 0.5, 0.8
trials = 4
seed = 42
out_trials = t.csv
";
        let cfg = EvalConfig::parse(text).unwrap();
        assert!(cfg.triangulate_parent);
        assert_eq!(cfg.p_grid, vec![0.2, 0.5, 0.8]);
        assert_eq!(cfg.trials, 4);
        assert_eq!(cfg.base_seed, 42);
        assert_eq!(cfg.out_trials.as_deref(), Some(std::path::Path::new("t.csv")));
        let parent = cfg.load_parent().unwrap();
        assert_eq!(parent.n(), 60);
        assert!(mcs_peo(&parent).is_ok());

        assert!(EvalConfig::parse("parent = er 10 0.1\n").is_err());
        assert!(EvalConfig::parse(
            "parent = er 10 0.1\nestimator = unbiased\np = 0\ntrials = 1\nseed = 1"
        )
        .is_err());
    }

    #[test]
    fn eval_runs_deterministically() {
        let parent = random_chordal(60, 0.05, 3);
        let kind = EstimatorKind::UnbiasedChordal;
        let a = run_eval(&parent, &kind, &[0.4, 0.8], 6, 10).unwrap();
        let b = run_eval(&parent, &kind, &[0.4, 0.8], 6, 10).unwrap();
        assert_eq!(trials_csv(&a), trials_csv(&b));
        assert_eq!(summary_csv(&a), summary_csv(&b));
        assert_eq!(a.trials.len(), 12);
        assert_eq!(a.summary.len(), 2);
        // Thread cap changes nothing.
        std::env::set_var("CC_SAMPLE_THREADS", "1");
        let c = run_eval(&parent, &kind, &[0.4, 0.8], 6, 10).unwrap();
        std::env::remove_var("CC_SAMPLE_THREADS");
        assert_eq!(trials_csv(&a), trials_csv(&c));
    }

    #[test]
    fn eval_at_full_sampling_is_exact() {
        let parent = random_chordal(40, 0.08, 8);
        let report = run_eval(&parent, &EstimatorKind::UnbiasedChordal, &[1.0], 5, 3).unwrap();
        for row in &report.trials {
            assert_eq!(row.rel_error, 0.0);
            assert_eq!(row.estimate, report.true_cc as f64);
        }
        assert_eq!(report.summary[0].mean_rel_error, 0.0);
    }

    #[test]
    fn every_estimator_is_exact_at_full_sampling_on_its_model_class() {
        use crate::graph::Graph;
        // Each estimator paired with a parent inside its model class.
        let chordal = random_chordal(30, 0.1, 4);
        let forest = {
            use rand::Rng;
            let mut rng = crate::graph::rng_from_seed(9);
            let mut edges = Vec::new();
            for v in 1..25u32 {
                if rng.gen::<f64>() < 0.7 {
                    edges.push((rng.gen_range(0..v), v));
                }
            }
            Graph::from_edges(25, edges).unwrap()
        };
        let cliques = disjoint_union(&[
            gen_named(NamedGraph::Complete(4)).unwrap(),
            gen_named(NamedGraph::Complete(3)).unwrap(),
            Graph::edgeless(3),
        ]);
        let cases: Vec<(EstimatorKind, &Graph)> = vec![
            (EstimatorKind::UnbiasedChordal, &chordal),
            (
                EstimatorKind::SmoothedChordal(Lambda::Fixed(1.5)),
                &chordal,
            ),
            (
                EstimatorKind::SmoothedChordal(Lambda::PLogN),
                &chordal,
            ),
            (EstimatorKind::CliquesUnbiased, &cliques),
            (
                EstimatorKind::CliquesSmoothed(Lambda::Fixed(0.7)),
                &cliques,
            ),
            (EstimatorKind::Forest, &forest),
            (
                EstimatorKind::NonChordalHeuristic(Box::new(EstimatorKind::UnbiasedChordal)),
                &chordal,
            ),
        ];
        for (kind, parent) in cases {
            let report = run_eval(parent, &kind, &[1.0], 3, 1).unwrap();
            assert_eq!(
                report.summary[0].mean_estimate, report.true_cc as f64,
                "{kind:?} must be exact at p = 1"
            );
            assert_eq!(report.summary[0].mean_rel_error, 0.0, "{kind:?}");
        }
    }

    #[test]
    fn verify_suites_pass() {
        for outcome in run_verify(VerifySuite::All) {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }

    #[test]
    fn csv_headers_are_exact() {
        let parent = Graph::edgeless(3);
        let report = run_eval(&parent, &EstimatorKind::UnbiasedChordal, &[0.5], 2, 0).unwrap();
        assert!(trials_csv(&report).starts_with("p,trial,estimate,true_cc,rel_error\n"));
        assert!(summary_csv(&report).starts_with("p,mean_rel_error,sd_rel_error,n_trials\n"));
    }
}
