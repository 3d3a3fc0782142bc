//! Property tests for the structural invariants of every module.

use std::collections::HashSet;

use distapprox::bipartite::{convert, mwvc_bipartite_pipeline, CoverConfig};
use distapprox::fractional::{
    approx_w_matching, doubling_w_matching, FractionalAssignment, Rational,
};
use distapprox::gadgets::{is_normalized, normalize_cover};
use distapprox::general::{greedy_coloring, half_integral_from_double_cover};
use distapprox::graph::{
    double_cover, generate, is_cover, subdivide_edges, CoverSolution, GenParams, GraphKind, Matching,
    WeightMode, WeightedGraph,
};
use distapprox::matching::{
    apply_augmentations, decompose_short_augmentations, greedy_matching, sample_bipartition,
};
use distapprox::oracle::{
    enumerate_augmenting_paths, exact_fractional_value, exact_fractional_w_matching, exact_mwm, exact_mwvc,
};
use distapprox::sim::{bfs_tree, cluster, tree_aggregate, AggregateOp, ElementWeights, SimConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn node_graph(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let params = GenParams { max_weight: 20, mode: WeightMode::Node };
    generate(&GraphKind::RandomGeneral { n, p }, &params, seed).unwrap()
}

fn bipartite_graph(left: usize, right: usize, p: f64, seed: u64) -> WeightedGraph {
    let params = GenParams { max_weight: 20, mode: WeightMode::Node };
    generate(&GraphKind::RandomBipartite { left, right, p }, &params, seed).unwrap()
}

fn edge_graph(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let params = GenParams { max_weight: 20, mode: WeightMode::Edge };
    generate(&GraphKind::RandomGeneral { n, p }, &params, seed).unwrap()
}

/// A feasible assignment built by random greedy filling, over denominator 1.
fn random_assignment(g: &WeightedGraph, seed: u64) -> FractionalAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slack: Vec<i128> = (0..g.n()).map(|v| i128::from(g.node_weight(v))).collect();
    let mut y = vec![0i128; g.m()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let room = slack[u].min(slack[v]);
        if room > 0 && rng.random_bool(0.7) {
            y[e] = rng.random_range(0..=room);
            slack[u] -= y[e];
            slack[v] -= y[e];
        }
    }
    FractionalAssignment::from_numerators(g, 1, y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn double_cover_is_bipartite_by_copy(n in 1usize..14, p in 0.0f64..0.8, seed in any::<u64>()) {
        let g = node_graph(n, p, seed);
        let d = double_cover(&g).unwrap();
        prop_assert_eq!(d.n(), 2 * g.n());
        prop_assert_eq!(d.m(), 2 * g.m());
        prop_assert!(d.edges().iter().all(|&(u, v)| u % 2 != v % 2));
        prop_assert!(d.is_bipartite());
    }

    #[test]
    fn subdivision_sizes(left in 1usize..5, right in 1usize..5, p in 0.0f64..1.0, k in 1usize..4, seed in any::<u64>()) {
        let g = generate(
            &GraphKind::RandomBipartite { left, right, p },
            &GenParams { max_weight: 1, mode: WeightMode::Node },
            seed,
        ).unwrap();
        let (h, sub) = subdivide_edges(&g, k).unwrap();
        prop_assert_eq!(h.n(), g.n() + 2 * k * g.m());
        prop_assert_eq!(h.m(), (2 * k + 1) * g.m());
        prop_assert!(h.is_bipartite());
        prop_assert_eq!(sub.paths.len(), g.m());
    }

    #[test]
    fn is_cover_matches_edge_scan(n in 1usize..12, p in 0.0f64..0.9, mask in any::<u16>(), seed in any::<u64>()) {
        let g = node_graph(n, p, seed);
        let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let scan = g.edges().iter().all(|&(u, v)| s.contains(&u) || s.contains(&v));
        prop_assert_eq!(is_cover(&g, &s).unwrap(), scan);
    }

    #[test]
    fn tree_sum_matches_central_sum(n in 1usize..40, seed in any::<u64>(), values in prop::collection::vec(0u128..1000, 40)) {
        let g = generate(&GraphKind::RandomTree { n }, &GenParams { max_weight: 1, mode: WeightMode::Node }, seed).unwrap();
        let config = SimConfig::for_graph(&g);
        let (tree, _) = bfs_tree(&g, 0, &config).unwrap();
        // Values below n keep sums within the O(log n) message budget.
        let vals: Vec<u128> = values[..n].iter().map(|&x| x % n as u128).collect();
        let per_node: Vec<Vec<u128>> = vals.iter().map(|&x| vec![x]).collect();
        let (agg, stats) = tree_aggregate(&g, &tree, &per_node, AggregateOp::Sum, 1, &config).unwrap();
        prop_assert_eq!(agg.items[0], vals.iter().sum::<u128>());
        prop_assert!(stats.max_bits_per_message <= stats.bit_budget);
    }

    #[test]
    fn protocol_runs_are_reproducible(n in 1usize..30, p in 0.0f64..0.5, seed in any::<u64>()) {
        let g = node_graph(n, p, seed);
        let config = SimConfig::for_graph(&g).with_seed(seed);
        let a = greedy_coloring(&g, &config).unwrap();
        let b = greedy_coloring(&g, &config).unwrap();
        prop_assert!(a.1.max_bits_per_message <= a.1.bit_budget);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn clustering_predicates_hold(n in 2usize..60, p in 0.02f64..0.3, seed in any::<u64>()) {
        let g = node_graph(n, p, seed);
        let c = cluster(&g, &ElementWeights::unit(&g), 3, 0.25, seed).unwrap();
        prop_assert!(c.audit(&g).is_ok());
        prop_assert!((0.0..=1.0).contains(&c.density));
    }

    #[test]
    fn doubling_cover_within_four(n in 1usize..13, p in 0.0f64..0.7, seed in any::<u64>()) {
        let g = node_graph(n, p, seed);
        let r = doubling_w_matching(&g, &SimConfig::for_graph(&g)).unwrap();
        let s = CoverSolution::new(&g, r.half_tight.clone()).unwrap();
        prop_assert!(s.is_cover(&g));
        let y = r.assignment.total();
        let ws = Rational::from_integer(i128::from(s.weight(&g)));
        let opt = Rational::from_integer(i128::from(exact_mwvc(&g).unwrap().weight(&g)));
        prop_assert!(ws <= y * 4);
        prop_assert!(y * 4 <= opt * 4);
        prop_assert!(r.stats.max_bits_per_message <= r.stats.bit_budget);
    }

    #[test]
    fn approximate_matching_ratio(n in 1usize..16, p in 0.0f64..0.6, delta in 0.05f64..0.5, seed in any::<u64>()) {
        let g = node_graph(n, p, seed);
        let a = approx_w_matching(&g, delta).unwrap();
        let exact = exact_fractional_value(&g).unwrap();
        let got = a.assignment.total();
        prop_assert!(got <= exact);
        let scaled = Rational::new(1_000_000 - (delta * 1e6) as i128, 1_000_000);
        prop_assert!(got >= exact * scaled);
    }

    #[test]
    fn pipeline_cover_dominates_every_assignment(left in 1usize..8, right in 1usize..8, p in 0.1f64..0.8, seed in any::<u64>()) {
        let g = bipartite_graph(left, right, p, seed);
        let r = mwvc_bipartite_pipeline(&g, &CoverConfig::new(&g, 0.25, seed)).unwrap();
        prop_assert!(r.cover.is_cover(&g));
        let w = Rational::from_integer(i128::from(r.cover.weight(&g)));
        prop_assert!(r.doubling.total() <= w);
        prop_assert!(random_assignment(&g, seed).total() <= w);
        prop_assert!(exact_fractional_value(&g).unwrap() <= w);
        prop_assert!(r.stats.max_bits_per_message <= r.stats.bit_budget);
    }

    #[test]
    fn conversion_only_removes_paths(n in 2usize..11, p in 0.1f64..0.6, seed in any::<u64>(), pick in any::<u64>()) {
        let g = node_graph(n, p, seed);
        let a = random_assignment(&g, seed);
        let slack = a.slack_nums(&g);
        let nodes: Vec<usize> = (0..g.n()).filter(|&v| slack[v] > 0 && pick >> (v % 64) & 1 == 1).collect();
        let edges: Vec<usize> = (0..g.m()).filter(|&e| a.y_num(e) > 0 && pick >> ((e + 17) % 64) & 1 == 1).collect();
        let b = convert(&g, &a, &nodes, &edges).unwrap();
        let before: HashSet<Vec<usize>> = enumerate_augmenting_paths(&g, &a, 7).unwrap().into_iter().collect();
        for path in enumerate_augmenting_paths(&g, &b, 7).unwrap() {
            prop_assert!(before.contains(&path));
        }
    }

    #[test]
    fn half_integral_weight_is_half_the_double(n in 1usize..9, p in 0.0f64..0.7, seed in any::<u64>()) {
        let g = node_graph(n, p, seed);
        let d = double_cover(&g).unwrap();
        let s = exact_mwvc(&d).unwrap();
        let x = half_integral_from_double_cover(&g, &s).unwrap();
        prop_assert_eq!(x.doubled_weight(&g), s.weight(&d));
        for &(u, v) in g.edges() {
            prop_assert!(x.halves(u) + x.halves(v) >= 2);
        }
    }

    #[test]
    fn egervary_equality(left in 1usize..7, right in 1usize..7, p in 0.0f64..0.9, seed in any::<u64>()) {
        let g = bipartite_graph(left, right, p, seed);
        prop_assert_eq!(exact_fractional_w_matching(&g).unwrap(), u128::from(exact_mwvc(&g).unwrap().weight(&g)));
    }

    #[test]
    fn sample_keeps_only_bichromatic_edges(n in 1usize..16, p in 0.0f64..0.6, seed in any::<u64>(), bits in any::<u32>()) {
        let g = edge_graph(n, p, seed);
        let m = greedy_matching(&g);
        let colors: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
        let s = sample_bipartition(&g, &m, colors.clone()).unwrap();
        for &e in &s.edges {
            let (u, v) = g.endpoints(e);
            prop_assert!(colors[u] != colors[v] && s.included[u] && s.included[v]);
        }
        for &e in &s.carried {
            let (u, v) = g.endpoints(e);
            prop_assert!(colors[u] == colors[v] && !s.included[u] && !s.included[v]);
        }
        let h = s.subgraph(&g).unwrap();
        let best = exact_mwm(&h.graph).unwrap();
        let chosen: Vec<usize> = best.edges().iter().map(|&e| h.edges[e]).collect();
        prop_assert!(s.combine(&g, &chosen).is_ok());
    }

    #[test]
    fn decomposition_is_short_and_disjoint(n in 2usize..14, p in 0.1f64..0.6, seed in any::<u64>()) {
        let g = edge_graph(n, p, seed);
        let m = greedy_matching(&g);
        let opt = exact_mwm(&g).unwrap();
        let d = decompose_short_augmentations(&g, &m, &opt, 9).unwrap();
        let mut seen = HashSet::new();
        for s in &d.structures {
            prop_assert!(s.len() <= 9 && s.gain > 0);
            for &v in &s.nodes {
                prop_assert!(seen.insert(v));
            }
        }
        let out = d.apply(&g, &m).unwrap();
        prop_assert_eq!(i128::from(out.weight(&g)), i128::from(m.weight(&g)) + d.net_gain(&g));
        prop_assert!(apply_augmentations(&g, &Matching::empty(), &[]).unwrap().is_empty());
    }

    #[test]
    fn normalization_shrinks_and_is_idempotent(n in 1usize..6, p in 0.2f64..1.0, k in 1usize..3, mask in any::<u64>(), seed in any::<u64>()) {
        let g = generate(&GraphKind::RandomGeneral { n, p }, &GenParams { max_weight: 1, mode: WeightMode::Node }, seed).unwrap();
        let (h, sub) = subdivide_edges(&g, k).unwrap();
        let mut nodes: Vec<usize> = (0..h.n()).filter(|&v| mask >> (v % 64) & 1 == 1).collect();
        // Complete to a cover by adding one endpoint per uncovered edge.
        let mut member = vec![false; h.n()];
        for &v in &nodes { member[v] = true; }
        for &(u, v) in h.edges() {
            if !member[u] && !member[v] { member[v] = true; nodes.push(v); }
        }
        let s = CoverSolution::new(&h, nodes).unwrap();
        let t = normalize_cover(&h, &sub, &s).unwrap();
        prop_assert!(t.len() <= s.len());
        prop_assert!(is_normalized(&sub, &t));
        prop_assert_eq!(normalize_cover(&h, &sub, &t).unwrap(), t);
    }
}
