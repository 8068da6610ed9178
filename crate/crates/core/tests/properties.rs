//! Property-based invariants for the graph machinery, elimination
//! orderings, samplers and estimators.

use proptest::prelude::*;

use ccsample_core::chordal::{
    alternating_cc, clique_counts, clique_number, mcs_peo, mcs_peo_seeded, sandwich_bounds,
    triangulate,
};
use ccsample_core::estimators::{
    estimate_forest, estimate_unbiased_chordal, estimate_unbiased_chordal_via_counts,
    poisson_tail,
};
use ccsample_core::graph::{
    connected_components, disjoint_union, gen_er, parse_edge_list, Graph,
};
use ccsample_core::sampling::bernoulli_sample;

fn arb_graph(max_n: usize, density: f64) -> impl Strategy<Value = Graph> {
    (0..=max_n, any::<u64>()).prop_map(move |(n, seed)| gen_er(n, density, seed))
}

fn arb_chordal(max_n: usize) -> impl Strategy<Value = Graph> {
    arb_graph(max_n, 0.25).prop_map(|g| triangulate(&g))
}

/// Test-only breadth-first component counter, independent of the
/// union-find implementation.
fn bfs_components(g: &Graph) -> usize {
    let mut seen = vec![false; g.n()];
    let mut count = 0;
    for start in 0..g.n() as u32 {
        if seen[start as usize] {
            continue;
        }
        count += 1;
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start as usize] = true;
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_symmetric_and_degrees_sum(g in arb_graph(24, 0.2)) {
        let mut degree_sum = 0usize;
        for v in 0..g.n() as u32 {
            degree_sum += g.degree(v);
            for &u in g.neighbors(v) {
                prop_assert!(g.has_edge(u, v));
                prop_assert_ne!(u, v);
            }
        }
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn components_match_bfs_and_add_under_union(
        a in arb_graph(16, 0.2),
        b in arb_graph(16, 0.15),
    ) {
        prop_assert_eq!(connected_components(&a).0, bfs_components(&a));
        prop_assert_eq!(connected_components(&b).0, bfs_components(&b));
        let u = disjoint_union(&[a.clone(), b.clone()]);
        prop_assert_eq!(
            connected_components(&u).0,
            connected_components(&a).0 + connected_components(&b).0
        );
    }

    #[test]
    fn edge_list_round_trips(g in arb_graph(20, 0.3)) {
        let parsed = parse_edge_list(&g.to_edge_list()).unwrap();
        prop_assert_eq!(parsed, g);
    }

    #[test]
    fn peo_certificate_is_valid(g in arb_chordal(18)) {
        let peo = mcs_peo(&g).unwrap();
        let order = peo.order();
        let mut pos = vec![0usize; g.n()];
        for (j, &v) in order.iter().enumerate() {
            pos[v as usize] = j;
        }
        for (j, &v) in order.iter().enumerate() {
            let earlier: Vec<u32> = g
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&u| pos[u as usize] < j)
                .collect();
            prop_assert_eq!(peo.c_values()[j] as usize, earlier.len());
            for (ai, &a) in earlier.iter().enumerate() {
                for &b in &earlier[ai + 1..] {
                    prop_assert!(g.has_edge(a, b));
                }
            }
        }
        prop_assert_eq!(peo.zero_count(), connected_components(&g).0);
    }

    #[test]
    fn c_multiset_is_tiebreak_invariant(g in arb_chordal(14), seed in any::<u64>()) {
        let mut base = mcs_peo(&g).unwrap().c_values().to_vec();
        base.sort_unstable();
        let mut other = mcs_peo_seeded(&g, Some(seed)).unwrap().c_values().to_vec();
        other.sort_unstable();
        prop_assert_eq!(base, other);
    }

    #[test]
    fn alternating_sum_and_sandwich(g in arb_chordal(16)) {
        let peo = mcs_peo(&g).unwrap();
        let counts = clique_counts(&peo).unwrap();
        let cc = connected_components(&g).0 as i128;
        prop_assert_eq!(alternating_cc(&counts), cc);
        let omega = clique_number(&peo);
        for r in 1..=4usize {
            let (lo, hi) = sandwich_bounds(&counts, r);
            prop_assert!(lo <= cc && cc <= hi);
            if 2 * r >= omega {
                prop_assert_eq!(lo, cc);
            }
        }
    }

    #[test]
    fn triangulation_is_chordal_supergraph_preserving_components(g in arb_graph(22, 0.18)) {
        let t = triangulate(&g);
        prop_assert!(mcs_peo(&t).is_ok());
        prop_assert_eq!(t.n(), g.n());
        for (u, v) in g.edges() {
            prop_assert!(t.has_edge(u, v));
        }
        prop_assert_eq!(connected_components(&t).0, connected_components(&g).0);
        // Idempotent: no further fill.
        prop_assert_eq!(triangulate(&t), t);
    }

    #[test]
    fn poisson_tail_is_monotone_and_bounded(lambda in 0.0f64..20.0, k in 0u32..80) {
        let t = poisson_tail(lambda, k);
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!(poisson_tail(lambda, k + 1) <= t + 1e-15);
        prop_assert_eq!(poisson_tail(lambda, 0), 1.0);
    }

    #[test]
    fn clique_sum_route_matches_elimination_route(
        g in arb_chordal(14),
        seed in any::<u64>(),
        p in 0.2f64..1.0,
    ) {
        // The alternating clique-count form, evaluated in exact integer
        // arithmetic and then scaled, agrees with the linear-time
        // elimination form to relative 1e-9 (samples here keep the clique
        // number small, where the count route is still well conditioned).
        let sg = bernoulli_sample(&g, p, seed);
        if clique_number(&mcs_peo(&sg.graph).unwrap()) <= 8 {
            let via_peo = estimate_unbiased_chordal(&sg, p).unwrap();
            let via_counts = estimate_unbiased_chordal_via_counts(&sg, p).unwrap();
            let scale = via_peo.abs().max(via_counts.abs()).max(1.0);
            prop_assert!((via_peo - via_counts).abs() / scale < 1e-9);
        }
    }

    #[test]
    fn forest_estimator_equals_chordal_on_forests(
        n in 1usize..20,
        edge_seed in any::<u64>(),
        sample_seed in any::<u64>(),
        p in 0.1f64..1.0,
    ) {
        use rand::Rng;
        let mut rng = ccsample_core::graph::rng_from_seed(edge_seed);
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for v in 1..n as u32 {
            if rng.gen::<f64>() < 0.8 {
                edges.push((rng.gen_range(0..v), v));
            }
        }
        let forest = Graph::from_edges(n, edges).unwrap();
        let sg = bernoulli_sample(&forest, p, sample_seed);
        let a = estimate_forest(&sg, p).unwrap();
        let b = estimate_unbiased_chordal(&sg, p).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn bernoulli_sample_size_and_membership(
        g in arb_graph(20, 0.2),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let sg = bernoulli_sample(&g, p, seed);
        prop_assert_eq!(sg.parent_n, g.n());
        prop_assert_eq!(sg.graph.n(), sg.sampled.len());
        // Edges of the sample are exactly the parent edges inside the set.
        for (u, v) in sg.graph.edges() {
            let pu = sg.sampled.members()[u as usize];
            let pv = sg.sampled.members()[v as usize];
            prop_assert!(g.has_edge(pu, pv));
        }
        let mut expected_edges = 0;
        for (u, v) in g.edges() {
            if sg.sampled.contains(u) && sg.sampled.contains(v) {
                expected_edges += 1;
            }
        }
        prop_assert_eq!(sg.graph.edge_count(), expected_edges);
    }
}
