//! Exact, brute-force ground truth at small scale.
//!
//! Everything in this module is an enumeration: estimator moments come from
//! summing over all vertex subsets with their exact sampling weights,
//! sampled-graph distributions from canonicalizing every induced subgraph,
//! and subgraph counts from direct subset checks. None of it shares code
//! with the linear-time estimator path, so the two sides can be held
//! against each other in tests.
//!
//! Vertex subsets are bitmasks; the subset-local elimination machinery here
//! is an independent reimplementation of the search in [`crate::chordal`].

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::chordal::NotChordal;
use crate::estimators::{poisson_tail, resolve_kind, EstimateError, EstimatorKind, ResolvedKind};
use crate::graph::{connected_components, Graph};

/// Largest parent size for full-subset enumeration (`2^N` work).
pub const MAX_ENUM_VERTICES: usize = 18;
/// Largest graph the isomorphism test accepts.
pub const MAX_ISO_VERTICES: usize = 12;
/// Largest graph canonicalization and distribution enumeration accept.
pub const MAX_CANON_VERTICES: usize = 14;
/// Largest pattern / host sizes for induced-subgraph counting.
pub const MAX_PATTERN_VERTICES: usize = 8;
pub const MAX_HOST_VERTICES: usize = 20;
/// Largest vertex count for the connected-graph catalogue.
pub const MAX_CATALOGUE_VERTICES: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{what} has {got} vertices, above the oracle limit of {limit}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("graphs must have the same vertex count, got {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("{0:?} is not applicable under this sampling model")]
    EstimatorNotApplicable(EstimatorKind),
    #[error("exact rational arithmetic does not cover smoothed estimators")]
    ExactUnsupported,
    #[error("sampling ratio must be a rational in [0, 1] with positive denominator")]
    InvalidRational,
    #[error("subset enumeration too large: C({n}, {k}) exceeds {limit}")]
    TooManySubsets { n: usize, k: usize, limit: u64 },
    #[error("cannot pick {requested} of {available} vertices")]
    SampleLargerThanGraph { requested: usize, available: usize },
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

#[inline]
fn bits(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

fn masks_of(g: &Graph) -> Vec<u32> {
    (0..g.n() as u32)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .fold(0u32, |acc, &u| acc | 1u32 << u)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Subset-local elimination machinery (independent of crate::chordal).
// ---------------------------------------------------------------------------

/// Maximum cardinality search restricted to `subset`. The visit order is
/// the candidate PEO (already-visited neighbors of each vertex form a
/// clique when the induced subgraph is chordal).
fn subset_mcs_order(adj: &[u32], subset: u32, out: &mut Vec<u8>) {
    out.clear();
    let mut weight = [0u16; 32];
    let mut unvisited = subset;
    while unvisited != 0 {
        let mut best: Option<usize> = None;
        for v in bits(unvisited) {
            match best {
                Some(b) if weight[b] >= weight[v] => {}
                _ => best = Some(v),
            }
        }
        let v = best.unwrap();
        unvisited &= !(1u32 << v);
        out.push(v as u8);
        for u in bits(adj[v] & unvisited) {
            weight[u] += 1;
        }
    }
}

/// Earlier-neighbor counts along the subset's elimination order, or the
/// first clique-condition failure.
fn subset_c_values(
    adj: &[u32],
    subset: u32,
    order: &mut Vec<u8>,
    c_out: &mut Vec<u8>,
) -> Result<(), NotChordal> {
    subset_mcs_order(adj, subset, order);
    c_out.clear();
    let mut pos = [0u8; 32];
    for (j, &v) in order.iter().enumerate() {
        pos[v as usize] = j as u8;
    }
    let mut earlier = 0u32;
    for &v in order.iter() {
        let e = adj[v as usize] & earlier;
        c_out.push(e.count_ones() as u8);
        if e != 0 {
            let mut u = 0usize;
            let mut best = 0u8;
            let mut first = true;
            for w in bits(e) {
                if first || pos[w] > best {
                    best = pos[w];
                    u = w;
                    first = false;
                }
            }
            let missing = e & !(1u32 << u) & !adj[u];
            if missing != 0 {
                let w = missing.trailing_zeros();
                return Err(NotChordal {
                    vertex: v as u32,
                    left: w,
                    right: u as u32,
                });
            }
        }
        earlier |= 1u32 << v;
    }
    Ok(())
}

/// Component sizes within `subset`, plus whether every component induces a
/// clique.
fn subset_component_sizes(adj: &[u32], subset: u32, sizes: &mut Vec<u8>) -> bool {
    sizes.clear();
    let mut left = subset;
    let mut all_cliques = true;
    while left != 0 {
        let seed = 1u32 << left.trailing_zeros();
        let mut comp = seed;
        loop {
            let mut grown = comp;
            for v in bits(comp) {
                grown |= adj[v] & subset;
            }
            if grown == comp {
                break;
            }
            comp = grown;
        }
        let size = comp.count_ones() as u8;
        for v in bits(comp) {
            if adj[v] & comp != comp & !(1u32 << v) {
                all_cliques = false;
            }
        }
        sizes.push(size);
        left &= !comp;
    }
    all_cliques
}

/// Fill-in along the subset's search order; returns the earlier-neighbor
/// counts of the filled (chordal) graph and its edge count.
fn subset_triangulated(adj: &[u32], subset: u32, order: &mut Vec<u8>, c_out: &mut Vec<u8>) -> usize {
    subset_mcs_order(adj, subset, order);
    let mut wadj = [0u32; 32];
    for v in bits(subset) {
        wadj[v] = adj[v] & subset;
    }
    let mut prefix = vec![0u32; order.len() + 1];
    for (j, &v) in order.iter().enumerate() {
        prefix[j + 1] = prefix[j] | 1u32 << v;
    }
    for j in (0..order.len()).rev() {
        let v = order[j] as usize;
        let e = wadj[v] & prefix[j];
        if e.count_ones() >= 2 {
            for a in bits(e) {
                wadj[a] |= e & !(1u32 << a);
            }
        }
    }
    c_out.clear();
    let mut edges = 0usize;
    for (j, &v) in order.iter().enumerate() {
        let e = wadj[v as usize] & prefix[j];
        c_out.push(e.count_ones() as u8);
        edges += e.count_ones() as usize;
    }
    edges
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

// ---------------------------------------------------------------------------
// Compiled per-subset evaluators.
// ---------------------------------------------------------------------------

/// Float estimator specialized for bitmask subsets of a fixed parent.
enum FastKind {
    Unbiased,
    /// Tapered coefficients `(-q/p)^c * P(L >= c)` indexed by `c`.
    Smoothed(Vec<f64>),
    Cliques,
    /// Coefficients `(-q/p)^r * P(L >= r)` indexed by component size `r`.
    CliquesSmoothed(Vec<f64>),
    /// Inverse inclusion probabilities indexed by clique size.
    Uniform(Vec<f64>),
    Forest,
    Heuristic(Box<FastKind>),
}

struct FastEval {
    p: f64,
    /// `(-q/p)^c` for `c = 0..=n`.
    pow: Vec<f64>,
    kind: FastKind,
    order: Vec<u8>,
    cbuf: Vec<u8>,
    sbuf: Vec<u8>,
}

fn compile_kind(
    kind: &ResolvedKind,
    p: f64,
    n: usize,
    uniform_inv: Option<&[f64]>,
) -> Result<FastKind, OracleError> {
    let base = -(1.0 - p) / p;
    Ok(match kind {
        ResolvedKind::UnbiasedChordal => FastKind::Unbiased,
        ResolvedKind::SmoothedChordal(l) => FastKind::Smoothed(
            (0..=n)
                .map(|c| base.powi(c as i32) * poisson_tail(*l, c as u32))
                .collect(),
        ),
        ResolvedKind::CliquesUnbiased => FastKind::Cliques,
        ResolvedKind::CliquesSmoothed(l) => FastKind::CliquesSmoothed(
            (0..=n)
                .map(|r| base.powi(r as i32) * poisson_tail(*l, r as u32))
                .collect(),
        ),
        ResolvedKind::UniformUnbiased => match uniform_inv {
            Some(inv) => FastKind::Uniform(inv.to_vec()),
            None => {
                return Err(OracleError::EstimatorNotApplicable(
                    EstimatorKind::UniformUnbiased,
                ))
            }
        },
        ResolvedKind::Forest => FastKind::Forest,
        ResolvedKind::NonChordalHeuristic(inner) => {
            FastKind::Heuristic(Box::new(compile_kind(inner, p, n, uniform_inv)?))
        }
    })
}

impl FastEval {
    fn new(
        kind: &ResolvedKind,
        p: f64,
        n: usize,
        uniform_inv: Option<&[f64]>,
    ) -> Result<FastEval, OracleError> {
        let base = -(1.0 - p) / p;
        Ok(FastEval {
            p,
            pow: (0..=n).map(|c| base.powi(c as i32)).collect(),
            kind: compile_kind(kind, p, n, uniform_inv)?,
            order: Vec::with_capacity(n),
            cbuf: Vec::with_capacity(n),
            sbuf: Vec::with_capacity(n),
        })
    }

    fn eval(&mut self, adj: &[u32], subset: u32) -> Result<f64, EstimateError> {
        // Split borrows: the buffers live outside `kind`.
        let FastEval {
            p,
            pow,
            kind,
            order,
            cbuf,
            sbuf,
        } = self;
        eval_kind(kind, adj, subset, *p, pow, order, cbuf, sbuf)
    }
}

#[allow(clippy::too_many_arguments)]
fn eval_kind(
    kind: &FastKind,
    adj: &[u32],
    subset: u32,
    p: f64,
    pow: &[f64],
    order: &mut Vec<u8>,
    cbuf: &mut Vec<u8>,
    sbuf: &mut Vec<u8>,
) -> Result<f64, EstimateError> {
    match kind {
        FastKind::Unbiased => {
            subset_c_values(adj, subset, order, cbuf)
                .map_err(EstimateError::NotChordalSample)?;
            Ok(cbuf.iter().map(|&c| pow[c as usize]).sum::<f64>() / p)
        }
        FastKind::Smoothed(coef) => {
            subset_c_values(adj, subset, order, cbuf)
                .map_err(EstimateError::NotChordalSample)?;
            Ok(cbuf.iter().map(|&c| coef[c as usize]).sum::<f64>() / p)
        }
        FastKind::Cliques => {
            if !subset_component_sizes(adj, subset, sbuf) {
                return Err(EstimateError::NotUnionOfCliques {
                    size: sbuf.iter().map(|&s| s as usize).max().unwrap_or(0),
                });
            }
            Ok(sbuf.iter().map(|&r| 1.0 - pow[r as usize]).sum())
        }
        FastKind::CliquesSmoothed(coef) => {
            if !subset_component_sizes(adj, subset, sbuf) {
                return Err(EstimateError::NotUnionOfCliques {
                    size: sbuf.iter().map(|&s| s as usize).max().unwrap_or(0),
                });
            }
            Ok(sbuf.iter().map(|&r| 1.0 - coef[r as usize]).sum())
        }
        FastKind::Uniform(inv) => {
            subset_c_values(adj, subset, order, cbuf)
                .map_err(EstimateError::NotChordalSample)?;
            Ok(alternating_weighted(cbuf, inv))
        }
        FastKind::Forest => {
            let v = subset.count_ones() as f64;
            let e: u32 = bits(subset).map(|x| (adj[x] & subset).count_ones()).sum();
            Ok(v / p - (e / 2) as f64 / (p * p))
        }
        FastKind::Heuristic(inner) => {
            let edges = subset_triangulated(adj, subset, order, cbuf);
            match inner.as_ref() {
                FastKind::Unbiased => {
                    Ok(cbuf.iter().map(|&c| pow[c as usize]).sum::<f64>() / p)
                }
                FastKind::Smoothed(coef) => {
                    Ok(cbuf.iter().map(|&c| coef[c as usize]).sum::<f64>() / p)
                }
                FastKind::Uniform(inv) => Ok(alternating_weighted(cbuf, inv)),
                FastKind::Forest => {
                    let v = subset.count_ones() as f64;
                    Ok(v / p - edges as f64 / (p * p))
                }
                _ => unreachable!("heuristic inner is restricted to the chordal family"),
            }
        }
    }
}

/// `sum_i (-1)^{i+1} s(K_i) * inv[i]` with clique counts taken from the
/// earlier-neighbor counts.
fn alternating_weighted(c_values: &[u8], inv: &[f64]) -> f64 {
    let omega = c_values.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut counts = vec![0u64; omega + 1];
    for &c in c_values {
        for (i, slot) in counts.iter_mut().enumerate().take(c as usize + 2).skip(1) {
            *slot += binomial_u128(c as usize, i - 1) as u64;
        }
    }
    let mut total = 0.0;
    for (i, &s) in counts.iter().enumerate().skip(1) {
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * s as f64 * inv[i];
    }
    total
}

// ---------------------------------------------------------------------------
// Moment enumeration.
// ---------------------------------------------------------------------------

/// Exact estimator moments under independent sampling, by summing over all
/// `2^N` vertex subsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub mse_vs_cc: f64,
}

/// Same moments in exact rational arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMoments {
    pub mean: BigRational,
    pub variance: BigRational,
    pub mse_vs_cc: BigRational,
}

impl ExactMoments {
    pub fn mean_f64(&self) -> f64 {
        self.mean.to_f64().unwrap_or(f64::NAN)
    }
    pub fn variance_f64(&self) -> f64 {
        self.variance.to_f64().unwrap_or(f64::NAN)
    }
    pub fn mse_f64(&self) -> f64 {
        self.mse_vs_cc.to_f64().unwrap_or(f64::NAN)
    }
}

fn check_enum_size(g: &Graph) -> Result<(), OracleError> {
    if g.n() > MAX_ENUM_VERTICES {
        return Err(OracleError::TooLarge {
            what: "moment enumeration parent",
            got: g.n(),
            limit: MAX_ENUM_VERTICES,
        });
    }
    Ok(())
}

/// Exact mean, variance and mean squared error of `estimator` under
/// independent vertex sampling with ratio `p`, over all `2^N` subsets.
pub fn enumerate_moments(
    g: &Graph,
    p: f64,
    estimator: &EstimatorKind,
) -> Result<Moments, OracleError> {
    check_enum_size(g)?;
    let n = g.n();
    let resolved = resolve_kind(estimator, p, n)?;
    let adj = masks_of(g);
    let mut eval = FastEval::new(&resolved, p, n, None)?;
    // Subset weights p^k q^{n-k}.
    let q = 1.0 - p;
    let mut wk = vec![0.0f64; n + 1];
    for (k, w) in wk.iter_mut().enumerate() {
        *w = p.powi(k as i32) * q.powi((n - k) as i32);
    }
    let mut mean = 0.0;
    let mut second = 0.0;
    for subset in 0..(1u64 << n) {
        let subset = subset as u32;
        let value = eval.eval(&adj, subset)?;
        let w = wk[subset.count_ones() as usize];
        mean += w * value;
        second += w * value * value;
    }
    let cc = connected_components(g).0 as f64;
    Ok(Moments {
        mean,
        variance: second - mean * mean,
        mse_vs_cc: second - 2.0 * cc * mean + cc * cc,
    })
}

/// Rational estimator value for one subset; only the estimators whose
/// formulas are rational in `p` are supported.
#[allow(clippy::too_many_arguments)]
fn eval_exact(
    kind: &ResolvedKind,
    adj: &[u32],
    subset: u32,
    p: &BigRational,
    pow: &[BigRational],
    uniform_inv: Option<&[BigRational]>,
    order: &mut Vec<u8>,
    cbuf: &mut Vec<u8>,
    sbuf: &mut Vec<u8>,
) -> Result<BigRational, OracleError> {
    match kind {
        ResolvedKind::UnbiasedChordal => {
            subset_c_values(adj, subset, order, cbuf)
                .map_err(|w| OracleError::Estimate(EstimateError::NotChordalSample(w)))?;
            let mut sum = BigRational::zero();
            for &c in cbuf.iter() {
                sum += &pow[c as usize];
            }
            Ok(sum / p)
        }
        ResolvedKind::CliquesUnbiased => {
            if !subset_component_sizes(adj, subset, sbuf) {
                return Err(OracleError::Estimate(EstimateError::NotUnionOfCliques {
                    size: sbuf.iter().map(|&s| s as usize).max().unwrap_or(0),
                }));
            }
            let mut sum = BigRational::zero();
            for &r in sbuf.iter() {
                sum += BigRational::one() - &pow[r as usize];
            }
            Ok(sum)
        }
        ResolvedKind::UniformUnbiased => {
            let inv = uniform_inv.ok_or(OracleError::EstimatorNotApplicable(
                EstimatorKind::UniformUnbiased,
            ))?;
            subset_c_values(adj, subset, order, cbuf)
                .map_err(|w| OracleError::Estimate(EstimateError::NotChordalSample(w)))?;
            let omega = cbuf.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
            let mut counts = vec![0u64; omega + 1];
            for &c in cbuf.iter() {
                for (i, slot) in counts.iter_mut().enumerate().take(c as usize + 2).skip(1) {
                    *slot += binomial_u128(c as usize, i - 1) as u64;
                }
            }
            let mut total = BigRational::zero();
            for (i, &s) in counts.iter().enumerate().skip(1) {
                let term = BigRational::from_integer(BigInt::from(s)) * &inv[i];
                if i % 2 == 1 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            Ok(total)
        }
        ResolvedKind::Forest => {
            let v = BigRational::from_integer(BigInt::from(subset.count_ones()));
            let e: u32 = bits(subset).map(|x| (adj[x] & subset).count_ones()).sum();
            let e = BigRational::from_integer(BigInt::from(e / 2));
            Ok(v / p - e / (p * p))
        }
        ResolvedKind::NonChordalHeuristic(inner) => {
            let edges = subset_triangulated(adj, subset, order, cbuf);
            match inner.as_ref() {
                ResolvedKind::UnbiasedChordal => {
                    let mut sum = BigRational::zero();
                    for &c in cbuf.iter() {
                        sum += &pow[c as usize];
                    }
                    Ok(sum / p)
                }
                ResolvedKind::Forest => {
                    let v = BigRational::from_integer(BigInt::from(subset.count_ones()));
                    Ok(v / p - BigRational::from_integer(BigInt::from(edges)) / (p * p))
                }
                ResolvedKind::UniformUnbiased => {
                    // Counts from the filled search; reuse the uniform branch
                    // by faking an already-chordal evaluation.
                    let inv = uniform_inv.ok_or(OracleError::EstimatorNotApplicable(
                        EstimatorKind::UniformUnbiased,
                    ))?;
                    let omega = cbuf.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
                    let mut counts = vec![0u64; omega + 1];
                    for &c in cbuf.iter() {
                        for (i, slot) in
                            counts.iter_mut().enumerate().take(c as usize + 2).skip(1)
                        {
                            *slot += binomial_u128(c as usize, i - 1) as u64;
                        }
                    }
                    let mut total = BigRational::zero();
                    for (i, &s) in counts.iter().enumerate().skip(1) {
                        let term = BigRational::from_integer(BigInt::from(s)) * &inv[i];
                        if i % 2 == 1 {
                            total += term;
                        } else {
                            total -= term;
                        }
                    }
                    Ok(total)
                }
                _ => Err(OracleError::ExactUnsupported),
            }
        }
        ResolvedKind::SmoothedChordal(_) | ResolvedKind::CliquesSmoothed(_) => {
            Err(OracleError::ExactUnsupported)
        }
    }
}

fn rational_p(p_num: i64, p_den: i64) -> Result<BigRational, OracleError> {
    if p_den <= 0 || p_num < 0 || p_num > p_den {
        return Err(OracleError::InvalidRational);
    }
    Ok(BigRational::new(BigInt::from(p_num), BigInt::from(p_den)))
}

fn neg_q_over_p_powers(p: &BigRational, n: usize) -> Vec<BigRational> {
    let base = (p.clone() - BigRational::one()) / p.clone(); // -(q/p)
    let mut pow = Vec::with_capacity(n + 1);
    pow.push(BigRational::one());
    for c in 1..=n {
        let prev = pow[c - 1].clone();
        pow.push(prev * &base);
    }
    pow
}

/// [`enumerate_moments`] in exact rational arithmetic, for `p = p_num/p_den`.
/// Turns unbiasedness and variance identities into equality tests. Smoothed
/// estimators are not expressible here (their coefficients are
/// transcendental) and yield [`OracleError::ExactUnsupported`].
pub fn enumerate_moments_exact(
    g: &Graph,
    p_num: i64,
    p_den: i64,
    estimator: &EstimatorKind,
) -> Result<ExactMoments, OracleError> {
    check_enum_size(g)?;
    let n = g.n();
    let p = rational_p(p_num, p_den)?;
    let pf = p.to_f64().unwrap();
    if pf == 0.0 {
        return Err(OracleError::Estimate(EstimateError::InvalidSamplingRatio(
            0.0,
        )));
    }
    let resolved = resolve_kind(estimator, pf, n)?;
    let adj = masks_of(g);
    let pow = neg_q_over_p_powers(&p, n);
    let q = BigRational::one() - &p;
    // Weights p^k q^{n-k}.
    let mut wk = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut w = BigRational::one();
        for _ in 0..k {
            w *= &p;
        }
        for _ in 0..(n - k) {
            w *= &q;
        }
        wk.push(w);
    }
    let (mut order, mut cbuf, mut sbuf) = (Vec::new(), Vec::new(), Vec::new());
    let mut mean = BigRational::zero();
    let mut second = BigRational::zero();
    for subset in 0..(1u64 << n) {
        let subset = subset as u32;
        let value = eval_exact(
            &resolved, &adj, subset, &p, &pow, None, &mut order, &mut cbuf, &mut sbuf,
        )?;
        let w = &wk[subset.count_ones() as usize];
        mean += w * &value;
        second += w * &value * &value;
    }
    let cc = BigRational::from_integer(BigInt::from(connected_components(g).0));
    let variance = &second - &mean * &mean;
    let mse = &second - BigRational::from_integer(BigInt::from(2)) * &cc * &mean + &cc * &cc;
    Ok(ExactMoments {
        mean,
        variance,
        mse_vs_cc: mse,
    })
}

/// Iterates all size-`k` subsets of `n` bits (Gosper's hack).
fn for_each_subset_of_size(n: usize, k: usize, mut f: impl FnMut(u32) -> Result<(), OracleError>) -> Result<(), OracleError> {
    if k == 0 {
        return f(0);
    }
    let limit = 1u64 << n;
    let mut s = (1u64 << k) - 1;
    while s < limit {
        f(s as u32)?;
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    Ok(())
}

fn uniform_inv_f64(big_n: usize, n_pick: usize) -> Vec<f64> {
    // inv[i] = C(N, n) / C(N-i, n-i) for i = 0..=n_pick
    (0..=n_pick)
        .map(|i| binomial_u128(big_n, n_pick) as f64 / binomial_u128(big_n - i, n_pick - i) as f64)
        .collect()
}

fn uniform_inv_exact(big_n: usize, n_pick: usize) -> Vec<BigRational> {
    (0..=n_pick)
        .map(|i| {
            BigRational::new(
                binomial_big(big_n, n_pick),
                binomial_big(big_n - i, n_pick - i),
            )
        })
        .collect()
}

fn check_uniform_size(g: &Graph, n_pick: usize) -> Result<(), OracleError> {
    check_enum_size(g)?;
    let count = binomial_u128(g.n(), n_pick);
    if count > 1_000_000 {
        return Err(OracleError::TooManySubsets {
            n: g.n(),
            k: n_pick,
            limit: 1_000_000,
        });
    }
    Ok(())
}

/// Exact moments under the uniform `n`-of-`N` design, over all `C(N, n)`
/// subsets. Bernoulli-family estimators are evaluated with the identified
/// ratio `p = n/N`.
pub fn enumerate_moments_uniform(
    g: &Graph,
    n_pick: usize,
    estimator: &EstimatorKind,
) -> Result<Moments, OracleError> {
    check_uniform_size(g, n_pick)?;
    let n = g.n();
    if n_pick > n {
        return Err(OracleError::SampleLargerThanGraph {
            requested: n_pick,
            available: n,
        });
    }
    let p_equiv = n_pick as f64 / n.max(1) as f64;
    if p_equiv == 0.0 && !matches!(estimator, EstimatorKind::UniformUnbiased) {
        return Err(OracleError::Estimate(EstimateError::InvalidSamplingRatio(
            0.0,
        )));
    }
    let resolved = resolve_kind(estimator, p_equiv.max(f64::MIN_POSITIVE), n)?;
    let adj = masks_of(g);
    let inv = uniform_inv_f64(n, n_pick);
    let mut eval = FastEval::new(&resolved, p_equiv.max(f64::MIN_POSITIVE), n, Some(&inv))?;
    let weight = 1.0 / binomial_u128(n, n_pick) as f64;
    let mut mean = 0.0;
    let mut second = 0.0;
    for_each_subset_of_size(n, n_pick, |subset| {
        let value = eval.eval(&adj, subset)?;
        mean += weight * value;
        second += weight * value * value;
        Ok(())
    })?;
    let cc = connected_components(g).0 as f64;
    Ok(Moments {
        mean,
        variance: second - mean * mean,
        mse_vs_cc: second - 2.0 * cc * mean + cc * cc,
    })
}

/// Exact-rational moments under the uniform design.
pub fn enumerate_moments_uniform_exact(
    g: &Graph,
    n_pick: usize,
    estimator: &EstimatorKind,
) -> Result<ExactMoments, OracleError> {
    check_uniform_size(g, n_pick)?;
    let n = g.n();
    if n_pick > n {
        return Err(OracleError::SampleLargerThanGraph {
            requested: n_pick,
            available: n,
        });
    }
    let p = BigRational::new(BigInt::from(n_pick), BigInt::from(n.max(1)));
    let pf = p.to_f64().unwrap();
    if n_pick == 0 && !matches!(estimator, EstimatorKind::UniformUnbiased) {
        return Err(OracleError::Estimate(EstimateError::InvalidSamplingRatio(
            0.0,
        )));
    }
    let resolved = resolve_kind(estimator, pf.max(f64::MIN_POSITIVE), n)?;
    let adj = masks_of(g);
    let pow = if n_pick == 0 {
        vec![BigRational::one()]
    } else {
        neg_q_over_p_powers(&p, n)
    };
    let inv = uniform_inv_exact(n, n_pick);
    let weight = BigRational::new(BigInt::one(), binomial_big(n, n_pick));
    let (mut order, mut cbuf, mut sbuf) = (Vec::new(), Vec::new(), Vec::new());
    let mut mean = BigRational::zero();
    let mut second = BigRational::zero();
    for_each_subset_of_size(n, n_pick, |subset| {
        let value = eval_exact(
            &resolved,
            &adj,
            subset,
            &p,
            &pow,
            Some(&inv),
            &mut order,
            &mut cbuf,
            &mut sbuf,
        )?;
        mean += &weight * &value;
        second += &weight * &value * &value;
        Ok(())
    })?;
    let cc = BigRational::from_integer(BigInt::from(connected_components(g).0));
    let variance = &second - &mean * &mean;
    let mse = &second - BigRational::from_integer(BigInt::from(2)) * &cc * &mean + &cc * &cc;
    Ok(ExactMoments {
        mean,
        variance,
        mse_vs_cc: mse,
    })
}

// ---------------------------------------------------------------------------
// Isomorphism, canonical keys and sampled-graph distributions.
// ---------------------------------------------------------------------------

fn degree_signature(adj: &[u32]) -> Vec<(u32, Vec<u32>)> {
    let deg: Vec<u32> = adj.iter().map(|m| m.count_ones()).collect();
    adj.iter()
        .enumerate()
        .map(|(v, &m)| {
            let mut nd: Vec<u32> = bits(m).map(|u| deg[u]).collect();
            nd.sort_unstable();
            (deg[v], nd)
        })
        .collect()
}

/// Exact induced isomorphism on bitmask graphs (backtracking with degree
/// and neighbor-degree pruning).
fn iso_masks(a: &[u32], b: &[u32]) -> bool {
    let n = a.len();
    if n != b.len() {
        return false;
    }
    if n == 0 {
        return true;
    }
    let ea: u32 = a.iter().map(|m| m.count_ones()).sum();
    let eb: u32 = b.iter().map(|m| m.count_ones()).sum();
    if ea != eb {
        return false;
    }
    let sig_a = degree_signature(a);
    let sig_b = degree_signature(b);
    let mut sa = sig_a.clone();
    let mut sb = sig_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return false;
    }

    // Assign vertices of `a` in order of decreasing degree.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(sig_a[v].0));

    #[allow(clippy::too_many_arguments)]
    fn assign(
        depth: usize,
        order: &[usize],
        a: &[u32],
        b: &[u32],
        sig_a: &[(u32, Vec<u32>)],
        sig_b: &[(u32, Vec<u32>)],
        map: &mut Vec<u32>,
        placed_a: u32,
        used_b: u32,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let u = order[depth];
        // Image of u's already-placed neighborhood.
        let mut required = 0u32;
        for x in bits(a[u] & placed_a) {
            required |= 1u32 << map[x];
        }
        for v in 0..b.len() {
            if used_b & (1u32 << v) != 0 || sig_b[v] != sig_a[u] {
                continue;
            }
            if b[v] & used_b != required {
                continue;
            }
            map[u] = v as u32;
            if assign(
                depth + 1,
                order,
                a,
                b,
                sig_a,
                sig_b,
                map,
                placed_a | 1 << u,
                used_b | 1 << v,
            ) {
                return true;
            }
        }
        false
    }

    let mut map = vec![0u32; n];
    assign(0, &order, a, b, &sig_a, &sig_b, &mut map, 0, 0)
}

/// Exact isomorphism test for graphs on up to 12 vertices.
pub fn are_isomorphic(g: &Graph, h: &Graph) -> Result<bool, OracleError> {
    for (graph, what) in [(g, "first isomorphism argument"), (h, "second isomorphism argument")] {
        if graph.n() > MAX_ISO_VERTICES {
            return Err(OracleError::TooLarge {
                what,
                got: graph.n(),
                limit: MAX_ISO_VERTICES,
            });
        }
    }
    Ok(iso_masks(&masks_of(g), &masks_of(h)))
}

/// Canonical form of a graph: the adjacency rows after relabeling by a
/// canonical vertex order. Two graphs get equal keys exactly when they are
/// isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonKey {
    rows: Vec<u32>,
}

impl CanonKey {
    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// The canonical representative as a labeled graph.
    pub fn to_graph(&self) -> Graph {
        let edges: Vec<(u32, u32)> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(v, &row)| {
                bits(row)
                    .filter(move |&u| u > v)
                    .map(move |u| (v as u32, u as u32))
            })
            .collect();
        Graph::from_edges(self.rows.len(), edges).expect("canonical rows are symmetric")
    }
}

/// Iterated color refinement: split classes by the multiset of neighbor
/// colors until stable. Color ids are reassigned densely by sorted
/// signature on every pass, so they are isomorphism-invariant and the
/// discrete case is a permutation of `0..n-1`.
fn refine_colors(adj: &[u32], colors: &mut [u32]) {
    let n = adj.len();
    loop {
        let before = {
            let mut seen: Vec<u32> = colors.to_vec();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        };
        let mut sigs: Vec<(u32, Vec<u32>)> = Vec::with_capacity(n);
        for v in 0..n {
            let mut nb: Vec<u32> = bits(adj[v]).map(|u| colors[u]).collect();
            nb.sort_unstable();
            sigs.push((colors[v], nb));
        }
        let mut uniq: Vec<&(u32, Vec<u32>)> = sigs.iter().collect();
        uniq.sort();
        uniq.dedup();
        let ids: BTreeMap<&(u32, Vec<u32>), u32> = uniq
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, i as u32))
            .collect();
        for v in 0..n {
            colors[v] = ids[&sigs[v]];
        }
        if uniq.len() == before {
            break;
        }
    }
}

/// Twin classes: vertices with identical open or closed neighborhoods are
/// interchangeable by an automorphism, so the canonical search only needs
/// one representative per class.
fn twin_classes(adj: &[u32]) -> Vec<u32> {
    let n = adj.len();
    let mut id: Vec<u32> = (0..n as u32).collect();
    fn find(id: &mut [u32], x: u32) -> u32 {
        let mut x = x;
        while id[x as usize] != x {
            let up = id[id[x as usize] as usize];
            id[x as usize] = up;
            x = up;
        }
        x
    }
    let mut open: HashMap<u32, u32> = HashMap::new();
    let mut closed: HashMap<u32, u32> = HashMap::new();
    for v in 0..n as u32 {
        if let Some(&w) = open.get(&adj[v as usize]) {
            let (a, b) = (find(&mut id, v), find(&mut id, w));
            id[a.max(b) as usize] = a.min(b);
        } else {
            open.insert(adj[v as usize], v);
        }
        let key = adj[v as usize] | 1u32 << v;
        if let Some(&w) = closed.get(&key) {
            let (a, b) = (find(&mut id, v), find(&mut id, w));
            id[a.max(b) as usize] = a.min(b);
        } else {
            closed.insert(key, v);
        }
    }
    (0..n as u32).map(|v| find(&mut id, v)).collect()
}

fn rows_under_colors(adj: &[u32], colors: &[u32]) -> Vec<u32> {
    let n = adj.len();
    let mut rows = vec![0u32; n];
    for v in 0..n {
        let mut row = 0u32;
        for u in bits(adj[v]) {
            row |= 1u32 << colors[u];
        }
        rows[colors[v] as usize] = row;
    }
    rows
}

fn canon_search(adj: &[u32], colors: Vec<u32>, twins: &[u32], best: &mut Option<Vec<u32>>) {
    // Smallest color owning more than one vertex.
    let mut class_of: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        class_of.entry(c).or_default().push(v);
    }
    let target = class_of.iter().find(|(_, vs)| vs.len() > 1);
    match target {
        None => {
            let rows = rows_under_colors(adj, &colors);
            if best.as_ref().is_none_or(|b| rows > *b) {
                *best = Some(rows);
            }
        }
        Some((_, members)) => {
            let mut tried: Vec<u32> = Vec::new();
            for &v in members {
                if tried.contains(&twins[v]) {
                    continue;
                }
                tried.push(twins[v]);
                let mut next: Vec<u32> = colors.iter().map(|&c| 2 * c + 1).collect();
                next[v] -= 1;
                refine_colors(adj, &mut next);
                canon_search(adj, next, twins, best);
            }
        }
    }
}

fn canonical_masks(adj: &[u32]) -> Vec<u32> {
    if adj.is_empty() {
        return Vec::new();
    }
    let mut colors = vec![0u32; adj.len()];
    refine_colors(adj, &mut colors);
    let twins = twin_classes(adj);
    let mut best = None;
    canon_search(adj, colors, &twins, &mut best);
    best.expect("search visits at least one leaf")
}

/// Canonical key for graphs on up to 14 vertices.
pub fn canonical_key(g: &Graph) -> Result<CanonKey, OracleError> {
    if g.n() > MAX_CANON_VERTICES {
        return Err(OracleError::TooLarge {
            what: "canonicalization input",
            got: g.n(),
            limit: MAX_CANON_VERTICES,
        });
    }
    Ok(CanonKey {
        rows: canonical_masks(&masks_of(g)),
    })
}

/// The induced subgraphs of `g`, bucketed by isomorphism class: canonical
/// key mapped to (subset size, number of subsets). Computed once, this
/// yields the sampled-graph distribution for every sampling ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetClasses {
    pub parent_n: usize,
    pub classes: BTreeMap<CanonKey, (usize, u64)>,
}

pub fn isomorphism_class_counts(g: &Graph) -> Result<SubsetClasses, OracleError> {
    if g.n() > MAX_CANON_VERTICES {
        return Err(OracleError::TooLarge {
            what: "class enumeration parent",
            got: g.n(),
            limit: MAX_CANON_VERTICES,
        });
    }
    let n = g.n();
    let adj = masks_of(g);
    let mut classes: BTreeMap<CanonKey, (usize, u64)> = BTreeMap::new();
    let mut sub_adj: Vec<u32> = Vec::with_capacity(n);
    let mut index = [0u8; 32];
    for subset in 0..(1u64 << n) {
        let subset = subset as u32;
        let k = subset.count_ones() as usize;
        for (i, v) in bits(subset).enumerate() {
            index[v] = i as u8;
        }
        sub_adj.clear();
        for v in bits(subset) {
            let mut row = 0u32;
            for u in bits(adj[v] & subset) {
                row |= 1u32 << index[u];
            }
            sub_adj.push(row);
        }
        let key = CanonKey {
            rows: canonical_masks(&sub_adj),
        };
        let entry = classes.entry(key).or_insert((k, 0));
        entry.1 += 1;
    }
    Ok(SubsetClasses { parent_n: n, classes })
}

/// Distribution of the isomorphism class of the sampled graph under
/// independent sampling with ratio `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDistribution {
    pub parent_n: usize,
    pub p: f64,
    /// (canonical key, probability), sorted by key; probabilities sum to 1.
    pub entries: Vec<(CanonKey, f64)>,
}

pub fn sampled_distribution(g: &Graph, p: f64) -> Result<SampleDistribution, OracleError> {
    assert!((0.0..=1.0).contains(&p), "p must be in [0, 1]");
    let classes = isomorphism_class_counts(g)?;
    Ok(distribution_from_classes(&classes, p))
}

pub fn distribution_from_classes(classes: &SubsetClasses, p: f64) -> SampleDistribution {
    assert!((0.0..=1.0).contains(&p), "p must be in [0, 1]");
    let n = classes.parent_n;
    let q = 1.0 - p;
    let entries = classes
        .classes
        .iter()
        .map(|(key, &(size, count))| {
            (
                key.clone(),
                count as f64 * p.powi(size as i32) * q.powi((n - size) as i32),
            )
        })
        .collect();
    SampleDistribution {
        parent_n: n,
        p,
        entries,
    }
}

/// Exact total variation distance between the sampled-graph class
/// distributions of two equal-size parents.
pub fn exact_tv(h: &Graph, h2: &Graph, p: f64) -> Result<f64, OracleError> {
    if h.n() != h2.n() {
        return Err(OracleError::SizeMismatch(h.n(), h2.n()));
    }
    let c1 = isomorphism_class_counts(h)?;
    let c2 = isomorphism_class_counts(h2)?;
    Ok(exact_tv_from_classes(&c1, &c2, p))
}

/// Total variation from precomputed class decompositions; useful when
/// sweeping over many values of `p`.
pub fn exact_tv_from_classes(c1: &SubsetClasses, c2: &SubsetClasses, p: f64) -> f64 {
    let d1 = distribution_from_classes(c1, p);
    let d2 = distribution_from_classes(c2, p);
    let m1: BTreeMap<&CanonKey, f64> = d1.entries.iter().map(|(k, v)| (k, *v)).collect();
    let m2: BTreeMap<&CanonKey, f64> = d2.entries.iter().map(|(k, v)| (k, *v)).collect();
    let mut total = 0.0;
    for (k, v) in &m1 {
        total += (v - m2.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, v) in &m2 {
        if !m1.contains_key(k) {
            total += v.abs();
        }
    }
    total / 2.0
}

/// Number of vertex subsets of `g` inducing a subgraph isomorphic to `h`.
pub fn count_induced(h: &Graph, g: &Graph) -> Result<u64, OracleError> {
    if h.n() > MAX_PATTERN_VERTICES {
        return Err(OracleError::TooLarge {
            what: "pattern",
            got: h.n(),
            limit: MAX_PATTERN_VERTICES,
        });
    }
    if g.n() > MAX_HOST_VERTICES {
        return Err(OracleError::TooLarge {
            what: "host",
            got: g.n(),
            limit: MAX_HOST_VERTICES,
        });
    }
    let k = h.n();
    if k > g.n() {
        return Ok(0);
    }
    let h_adj = masks_of(h);
    let h_edges: u32 = h_adj.iter().map(|m| m.count_ones()).sum::<u32>() / 2;
    let g_adj = masks_of(g);
    let mut count = 0u64;
    let mut sub_adj: Vec<u32> = Vec::with_capacity(k);
    let mut index = [0u8; 32];
    for_each_subset_of_size(g.n(), k, |subset| {
        for (i, v) in bits(subset).enumerate() {
            index[v] = i as u8;
        }
        sub_adj.clear();
        let mut edges = 0u32;
        for v in bits(subset) {
            let mut row = 0u32;
            for u in bits(g_adj[v] & subset) {
                row |= 1u32 << index[u];
            }
            edges += row.count_ones();
            sub_adj.push(row);
        }
        if edges / 2 == h_edges && iso_masks(&sub_adj, &h_adj) {
            count += 1;
        }
        Ok(())
    })?;
    Ok(count)
}

fn mask_connected(adj: &[u32], all: u32) -> bool {
    if all == 0 {
        return true;
    }
    let mut comp = 1u32 << all.trailing_zeros();
    loop {
        let mut grown = comp;
        for v in bits(comp) {
            grown |= adj[v] & all;
        }
        if grown == comp {
            break;
        }
        comp = grown;
    }
    comp == all
}

/// All connected graphs on up to `max_v` vertices (`max_v <= 6`), one
/// labeled representative per isomorphism class, in a deterministic order.
pub fn connected_graph_catalogue(max_v: usize) -> Result<Vec<Graph>, OracleError> {
    if max_v > MAX_CATALOGUE_VERTICES {
        return Err(OracleError::TooLarge {
            what: "catalogue order",
            got: max_v,
            limit: MAX_CATALOGUE_VERTICES,
        });
    }
    let mut out = Vec::new();
    for v in 1..=max_v {
        let pairs: Vec<(u32, u32)> = (0..v as u32)
            .flat_map(|a| ((a + 1)..v as u32).map(move |b| (a, b)))
            .collect();
        let mut seen: std::collections::HashSet<CanonKey> = std::collections::HashSet::new();
        for mask in 0..(1u64 << pairs.len()) {
            let mut adj = vec![0u32; v];
            for (i, &(a, b)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    adj[a as usize] |= 1 << b;
                    adj[b as usize] |= 1 << a;
                }
            }
            let all = (1u32 << v) - 1;
            if !mask_connected(&adj, all) {
                continue;
            }
            let key = CanonKey {
                rows: canonical_masks(&adj),
            };
            if seen.insert(key) {
                let edges: Vec<(u32, u32)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                out.push(Graph::from_edges(v, edges).expect("catalogue edges are valid"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Lambda;
    use crate::graph::{disjoint_union, gen_er, gen_named, parse_edge_list, NamedGraph};

    #[test]
    fn moments_k2_unbiased() {
        let k2 = gen_named(NamedGraph::Complete(2)).unwrap();
        let m = enumerate_moments(&k2, 0.5, &EstimatorKind::UnbiasedChordal).unwrap();
        assert!((m.mean - 1.0).abs() < 1e-12);
        assert!((m.variance - 1.0).abs() < 1e-12);
        // Both routes, and the cliques rewriting, agree exactly: variance 1
        // matches the size-profile identity (q/p)^2 * 1 at p = 1/2.
        for kind in [EstimatorKind::UnbiasedChordal, EstimatorKind::CliquesUnbiased] {
            let exact = enumerate_moments_exact(&k2, 1, 2, &kind).unwrap();
            assert_eq!(exact.mean, BigRational::from_integer(BigInt::from(1)));
            assert_eq!(exact.variance, BigRational::from_integer(BigInt::from(1)));
        }
    }

    #[test]
    fn moments_isolated_vertices() {
        // Five isolated vertices: mean 5, variance 5 q/p.
        let g = Graph::edgeless(5);
        for &(a, b) in &[(1i64, 4i64), (1, 2), (3, 4)] {
            let exact = enumerate_moments_exact(&g, a, b, &EstimatorKind::UnbiasedChordal).unwrap();
            assert_eq!(exact.mean, BigRational::from_integer(BigInt::from(5)));
            let q_over_p = BigRational::new(BigInt::from(b - a), BigInt::from(a));
            assert_eq!(
                exact.variance,
                BigRational::from_integer(BigInt::from(5)) * q_over_p
            );
        }
    }

    #[test]
    fn moments_at_p_one_are_degenerate() {
        let g = crate::chordal::triangulate(&gen_er(9, 0.3, 5));
        let cc = connected_components(&g).0 as f64;
        for kind in [
            EstimatorKind::UnbiasedChordal,
            EstimatorKind::SmoothedChordal(Lambda::Fixed(2.0)),
            EstimatorKind::Forest,
        ] {
            let m = enumerate_moments(&g, 1.0, &kind).unwrap();
            if matches!(kind, EstimatorKind::Forest) {
                // Forest formula is only exact on forests; at p = 1 it gives
                // v - e, which equals cc only when the graph is a forest.
                continue;
            }
            assert!((m.mean - cc).abs() < 1e-9, "{kind:?}");
            assert!(m.variance.abs() < 1e-9, "{kind:?}");
        }
    }

    #[test]
    fn uniform_moments_whole_graph() {
        let g = crate::chordal::triangulate(&gen_er(6, 0.4, 2));
        let cc = connected_components(&g).0 as f64;
        let m = enumerate_moments_uniform(&g, 6, &EstimatorKind::UniformUnbiased).unwrap();
        assert!((m.mean - cc).abs() < 1e-9);
        assert!(m.variance.abs() < 1e-9);
        let m3 = enumerate_moments_uniform(&g, 3, &EstimatorKind::UniformUnbiased).unwrap();
        assert!((m3.mean - cc).abs() < 1e-9, "unbiased over all 3-subsets");
        assert!(m3.variance >= -1e-12);
        let exact = enumerate_moments_uniform_exact(&g, 3, &EstimatorKind::UniformUnbiased).unwrap();
        assert_eq!(
            exact.mean,
            BigRational::from_integer(BigInt::from(connected_components(&g).0))
        );
    }

    #[test]
    fn oracle_rejects_oversized_and_inapplicable() {
        let big = Graph::edgeless(19);
        assert!(matches!(
            enumerate_moments(&big, 0.5, &EstimatorKind::UnbiasedChordal),
            Err(OracleError::TooLarge { .. })
        ));
        let k2 = gen_named(NamedGraph::Complete(2)).unwrap();
        assert!(matches!(
            enumerate_moments(&k2, 0.5, &EstimatorKind::UniformUnbiased),
            Err(OracleError::EstimatorNotApplicable(_))
        ));
        assert!(matches!(
            enumerate_moments_exact(&k2, 1, 2, &EstimatorKind::SmoothedChordal(Lambda::Fixed(1.0))),
            Err(OracleError::ExactUnsupported)
        ));
        assert!(matches!(
            enumerate_moments_exact(&k2, 3, 2, &EstimatorKind::UnbiasedChordal),
            Err(OracleError::InvalidRational)
        ));
    }

    #[test]
    fn count_induced_examples() {
        // Paths of length two in the diamond (K_4 minus an edge).
        let diamond = parse_edge_list("4 5\n0 1\n0 2\n1 2\n1 3\n2 3").unwrap();
        let p3 = gen_named(NamedGraph::Path(3)).unwrap();
        assert_eq!(count_induced(&p3, &diamond).unwrap(), 2);

        let k3 = gen_named(NamedGraph::Complete(3)).unwrap();
        let k4 = gen_named(NamedGraph::Complete(4)).unwrap();
        assert_eq!(count_induced(&k3, &k4).unwrap(), 4);

        // In a cycle plus a path tail, short paths appear 2r - 1 - i times.
        let r = 5;
        let h = disjoint_union(&[
            gen_named(NamedGraph::Cycle(r)).unwrap(),
            gen_named(NamedGraph::Path(r - 2)).unwrap(),
        ]);
        for i in 1..r {
            let pi = gen_named(NamedGraph::Path(i)).unwrap();
            assert_eq!(
                count_induced(&pi, &h).unwrap(),
                (2 * r - 1 - i) as u64,
                "path on {i}"
            );
        }
    }

    #[test]
    fn iso_examples() {
        let c6 = gen_named(NamedGraph::Cycle(6)).unwrap();
        let two_triangles = disjoint_union(&[
            gen_named(NamedGraph::Cycle(3)).unwrap(),
            gen_named(NamedGraph::Cycle(3)).unwrap(),
        ]);
        assert!(!are_isomorphic(&c6, &two_triangles).unwrap());
        let k3 = gen_named(NamedGraph::Complete(3)).unwrap();
        let p3 = gen_named(NamedGraph::Path(3)).unwrap();
        assert!(!are_isomorphic(&k3, &p3).unwrap());
        // Relabelings are isomorphic.
        let g = gen_er(9, 0.4, 8);
        let relabeled = {
            let perm: Vec<u32> = vec![4, 7, 0, 2, 8, 1, 6, 3, 5];
            let edges: Vec<(u32, u32)> = g
                .edges()
                .map(|(u, v)| (perm[u as usize], perm[v as usize]))
                .collect();
            Graph::from_edges(9, edges).unwrap()
        };
        assert!(are_isomorphic(&g, &relabeled).unwrap());
        assert!(are_isomorphic(&Graph::edgeless(0), &Graph::edgeless(0)).unwrap());
    }

    #[test]
    fn sampled_distribution_k2() {
        let k2 = gen_named(NamedGraph::Complete(2)).unwrap();
        let d = sampled_distribution(&k2, 0.5).unwrap();
        assert_eq!(d.entries.len(), 3);
        let total: f64 = d.entries.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let probs: Vec<f64> = d.entries.iter().map(|(_, p)| *p).collect();
        let mut sorted = probs.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - 0.25).abs() < 1e-12);
        assert!((sorted[1] - 0.25).abs() < 1e-12);
        assert!((sorted[2] - 0.5).abs() < 1e-12);

        // Point masses at the extremes.
        for p in [0.0, 1.0] {
            let d = sampled_distribution(&k2, p).unwrap();
            let nonzero: Vec<_> = d.entries.iter().filter(|(_, pr)| *pr > 0.0).collect();
            assert_eq!(nonzero.len(), 1);
            assert!((nonzero[0].1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tv_zero_for_isomorphic_parents() {
        let g = gen_er(7, 0.4, 1);
        let relabeled = {
            let perm: Vec<u32> = vec![3, 6, 0, 5, 1, 4, 2];
            Graph::from_edges(
                7,
                g.edges()
                    .map(|(u, v)| (perm[u as usize], perm[v as usize]))
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        };
        for p in [0.2, 0.5, 0.8] {
            assert!(exact_tv(&g, &relabeled, p).unwrap().abs() < 1e-12);
        }
        assert!(matches!(
            exact_tv(&g, &Graph::edgeless(6), 0.5),
            Err(OracleError::SizeMismatch(7, 6))
        ));
    }

    #[test]
    fn canonical_key_is_label_invariant() {
        let g = gen_er(8, 0.45, 3);
        let key = canonical_key(&g).unwrap();
        let perm: Vec<u32> = vec![5, 2, 7, 1, 0, 6, 3, 4];
        let relabeled = Graph::from_edges(
            8,
            g.edges()
                .map(|(u, v)| (perm[u as usize], perm[v as usize]))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(key, canonical_key(&relabeled).unwrap());
        assert_eq!(key.vertex_count(), 8);
        assert_eq!(key.edge_count(), g.edge_count());
    }

    #[test]
    fn catalogue_counts_match_known_series() {
        let cat = connected_graph_catalogue(6).unwrap();
        let mut by_order = [0usize; 7];
        for g in &cat {
            by_order[g.n()] += 1;
        }
        assert_eq!(&by_order[1..], &[1, 1, 2, 6, 21, 112]);
        assert!(connected_graph_catalogue(7).is_err());
    }

    #[test]
    fn fast_subset_machinery_matches_public_path() {
        use crate::graph::VertexSet;
        use crate::sampling::{SampleModel, SampleSpec, SampledGraph};
        // The mask-based elimination must agree with the Graph-based one on
        // chordality and on the c multiset.
        for seed in 0..40 {
            let g = gen_er(9, 0.35, seed);
            let adj = masks_of(&g);
            let full = (1u32 << 9) - 1;
            let (mut order, mut cbuf) = (Vec::new(), Vec::new());
            let mask_result = subset_c_values(&adj, full, &mut order, &mut cbuf);
            let public = crate::chordal::mcs_peo(&g);
            assert_eq!(mask_result.is_ok(), public.is_ok(), "seed {seed}");
            if let Ok(peo) = public {
                let mut a: Vec<u8> = cbuf.clone();
                a.sort_unstable();
                let mut b: Vec<u8> = peo.c_values().iter().map(|&c| c as u8).collect();
                b.sort_unstable();
                assert_eq!(a, b, "seed {seed}");
            }
        }
        // Estimator values per subset must match the public estimators.
        let parent = crate::chordal::triangulate(&gen_er(8, 0.3, 77));
        let adj = masks_of(&parent);
        let p = 0.35;
        for kind in [
            EstimatorKind::UnbiasedChordal,
            EstimatorKind::SmoothedChordal(Lambda::Fixed(1.3)),
            EstimatorKind::Forest,
            EstimatorKind::NonChordalHeuristic(Box::new(EstimatorKind::UnbiasedChordal)),
        ] {
            let resolved = resolve_kind(&kind, p, parent.n()).unwrap();
            let mut eval = FastEval::new(&resolved, p, parent.n(), None).unwrap();
            for subset in 0u32..(1 << parent.n()) {
                let members: Vec<u32> = bits(subset).map(|v| v as u32).collect();
                let vs = VertexSet::new(members).unwrap();
                let (graph, _) = crate::graph::induced_subgraph(&parent, &vs).unwrap();
                let sg = SampledGraph {
                    parent_n: parent.n(),
                    spec: SampleSpec {
                        model: SampleModel::Bernoulli(p),
                        seed: 0,
                    },
                    sampled: vs,
                    graph,
                };
                let fast = eval.eval(&adj, subset).unwrap();
                let slow = crate::estimators::estimate(&kind, &sg, p).unwrap();
                assert!(
                    (fast - slow).abs() <= 1e-9 * slow.abs().max(1.0),
                    "{kind:?} subset {subset:b}: {fast} vs {slow}"
                );
            }
        }
        // Cliques estimators on a union-of-cliques parent.
        let parent = disjoint_union(&[
            gen_named(NamedGraph::Complete(3)).unwrap(),
            gen_named(NamedGraph::Complete(2)).unwrap(),
            Graph::edgeless(2),
        ]);
        let adj = masks_of(&parent);
        for kind in [
            EstimatorKind::CliquesUnbiased,
            EstimatorKind::CliquesSmoothed(Lambda::Fixed(0.8)),
        ] {
            let resolved = resolve_kind(&kind, p, parent.n()).unwrap();
            let mut eval = FastEval::new(&resolved, p, parent.n(), None).unwrap();
            for subset in 0u32..(1 << parent.n()) {
                let members: Vec<u32> = bits(subset).map(|v| v as u32).collect();
                let vs = VertexSet::new(members).unwrap();
                let (graph, _) = crate::graph::induced_subgraph(&parent, &vs).unwrap();
                let sg = SampledGraph {
                    parent_n: parent.n(),
                    spec: SampleSpec {
                        model: SampleModel::Bernoulli(p),
                        seed: 0,
                    },
                    sampled: vs,
                    graph,
                };
                let fast = eval.eval(&adj, subset).unwrap();
                let slow = crate::estimators::estimate(&kind, &sg, p).unwrap();
                assert!((fast - slow).abs() <= 1e-9 * slow.abs().max(1.0));
            }
        }
    }

    #[test]
    fn canonical_key_partition_matches_exhaustive_reference() {
        // Reference key: maximize rows over every permutation (feasible to
        // 7 vertices). The refined search may pick a different canonical
        // representative, so the comparison is between the induced
        // partitions: two graphs share a refined key exactly when they
        // share an exhaustive key.
        fn exhaustive(adj: &[u32]) -> Vec<u32> {
            let n = adj.len();
            let mut perm: Vec<u32> = (0..n as u32).collect();
            let mut best: Option<Vec<u32>> = None;
            fn heap_permute(
                k: usize,
                perm: &mut Vec<u32>,
                adj: &[u32],
                best: &mut Option<Vec<u32>>,
            ) {
                if k == 1 {
                    let mut rows = vec![0u32; perm.len()];
                    for (v, &img) in perm.iter().enumerate() {
                        let mut row = 0u32;
                        for u in bits(adj[v]) {
                            row |= 1 << perm[u];
                        }
                        rows[img as usize] = row;
                    }
                    if best.as_ref().is_none_or(|b| rows > *b) {
                        *best = Some(rows);
                    }
                    return;
                }
                for i in 0..k {
                    heap_permute(k - 1, perm, adj, best);
                    if k.is_multiple_of(2) {
                        perm.swap(i, k - 1);
                    } else {
                        perm.swap(0, k - 1);
                    }
                }
            }
            if n == 0 {
                return Vec::new();
            }
            heap_permute(n, &mut perm, adj, &mut best);
            best.unwrap()
        }

        // All 64 graphs on 4 labeled vertices: the two keys must induce the
        // same equivalence classes.
        let pairs4 = [(0u32, 1u32), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let graphs: Vec<Graph> = (0u64..(1 << 6))
            .map(|mask| {
                let edges: Vec<(u32, u32)> = pairs4
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                Graph::from_edges(4, edges).unwrap()
            })
            .collect();
        let refined: Vec<Vec<u32>> = graphs
            .iter()
            .map(|g| canonical_masks(&masks_of(g)))
            .collect();
        let reference: Vec<Vec<u32>> = graphs.iter().map(|g| exhaustive(&masks_of(g))).collect();
        for i in 0..graphs.len() {
            for j in (i + 1)..graphs.len() {
                assert_eq!(
                    refined[i] == refined[j],
                    reference[i] == reference[j],
                    "graphs {i} and {j} disagree"
                );
            }
        }

        // Random graphs on 5..7 vertices against their relabelings, plus
        // pairs that are equal under one key must be equal under the other.
        for seed in 0..40u64 {
            let n = 5 + (seed as usize % 3);
            let g = gen_er(n, 0.4, seed);
            let h = gen_er(n, 0.4, seed + 1000);
            let kg = canonical_masks(&masks_of(&g));
            let kh = canonical_masks(&masks_of(&h));
            assert_eq!(
                kg == kh,
                exhaustive(&masks_of(&g)) == exhaustive(&masks_of(&h)),
                "seed {seed}"
            );
            assert_eq!(kg == kh, iso_masks(&masks_of(&g), &masks_of(&h)));
        }
        // Symmetric worst cases for the twin reduction: keys must stay
        // label-invariant and distinct across classes.
        let symmetric = [
            gen_named(NamedGraph::Complete(7)).unwrap(),
            gen_named(NamedGraph::Star(6)).unwrap(),
            gen_named(NamedGraph::Cycle(7)).unwrap(),
            disjoint_union(&[
                gen_named(NamedGraph::Complete(3)).unwrap(),
                gen_named(NamedGraph::Complete(3)).unwrap(),
            ]),
        ];
        let keys: Vec<Vec<u32>> = symmetric
            .iter()
            .map(|g| canonical_masks(&masks_of(g)))
            .collect();
        for i in 0..keys.len() {
            for j in (i + 1)..keys.len() {
                assert_ne!(keys[i], keys[j]);
            }
        }
    }

    #[test]
    fn all_four_vertex_graphs_fall_into_eleven_classes() {
        let pairs = [(0u32, 1u32), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut keys = std::collections::HashSet::new();
        for mask in 0u64..(1 << 6) {
            let edges: Vec<(u32, u32)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::from_edges(4, edges).unwrap();
            keys.insert(canonical_key(&g).unwrap());
        }
        assert_eq!(keys.len(), 11);
    }
}
