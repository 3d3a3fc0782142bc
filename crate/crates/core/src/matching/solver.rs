//! Leader-side matching solvers: exact bipartite maximum weight matching by
//! successive shortest paths, a throttled variant, and greedy.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{input, Result};
use crate::graph::{Matching, WeightedGraph};

/// How [`bipartite_mwm`] meets its `(1 − λ)` contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMode {
    /// Always returns a maximum weight matching.
    #[default]
    Exact,
    /// Stops at the first augmentation reaching `(1 − λ)` of the optimum.
    Throttled,
}

/// A bipartite matching with the optimum it was measured against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMatching {
    pub matching: Matching,
    pub optimum: u64,
    pub augmentations: usize,
}

/// Successive shortest augmenting paths from side-A free nodes, with
/// Dijkstra on reduced costs. `stop` sees the weight after each augmentation.
fn successive_paths(g: &WeightedGraph, side: &[bool], mut stop: impl FnMut(u64) -> bool) -> (Matching, usize) {
    let n = g.n();
    let mut mate: Vec<Option<usize>> = vec![None; n];
    // Potentials keep every residual arc cost non-negative.
    let mut pot = vec![0i128; n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let b = if side[u] { u } else { v };
        pot[b] = pot[b].min(-i128::from(g.edge_weight(e)));
    }
    let mut augmentations = 0;
    loop {
        let mut dist = vec![i128::MAX; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        for a in 0..n {
            if !side[a] && mate[a].is_none() {
                dist[a] = 0;
                heap.push(Reverse((0i128, a)));
            }
        }
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if !side[u] {
                for &(b, e) in g.neighbors(u) {
                    if mate[u] == Some(e) {
                        continue;
                    }
                    let nd = d - i128::from(g.edge_weight(e)) + pot[u] - pot[b];
                    if nd < dist[b] {
                        dist[b] = nd;
                        via[b] = Some(e);
                        heap.push(Reverse((nd, b)));
                    }
                }
            } else if let Some(e) = mate[u] {
                let (x, y) = g.endpoints(e);
                let a = if x == u { y } else { x };
                let nd = d + i128::from(g.edge_weight(e)) + pot[u] - pot[a];
                if nd < dist[a] {
                    dist[a] = nd;
                    via[a] = Some(e);
                    heap.push(Reverse((nd, a)));
                }
            }
        }
        // Best free B endpoint by true path cost.
        let target = (0..n)
            .filter(|&b| side[b] && mate[b].is_none() && dist[b] != i128::MAX)
            .min_by_key(|&b| (dist[b] + pot[b], b));
        let Some(end) = target else { break };
        if dist[end] + pot[end] >= 0 {
            break;
        }
        let reach = dist.iter().copied().filter(|&d| d != i128::MAX).max().unwrap_or(0);
        for v in 0..n {
            pot[v] += if dist[v] == i128::MAX { reach } else { dist[v] };
        }
        // Walk back: each B node takes the edge it was reached by.
        let mut pairs = Vec::new();
        let mut cur = end;
        while let Some(e) = via[cur] {
            let (x, y) = g.endpoints(e);
            let a = if x == cur { y } else { x };
            pairs.push((cur, a, e));
            match via[a] {
                Some(back) => {
                    let (x, y) = g.endpoints(back);
                    cur = if x == a { y } else { x };
                }
                None => break,
            }
        }
        for (b, a, e) in pairs {
            mate[a] = Some(e);
            mate[b] = Some(e);
        }
        augmentations += 1;
        if stop(matched_weight(g, &mate)) {
            break;
        }
    }
    let edges = collect(&mate, side);
    (Matching::new(g, edges).expect("augmenting keeps a matching"), augmentations)
}

fn collect(mate: &[Option<usize>], side: &[bool]) -> Vec<usize> {
    mate.iter()
        .enumerate()
        .filter(|&(v, _)| !side[v])
        .filter_map(|(_, &e)| e)
        .collect()
}

fn matched_weight(g: &WeightedGraph, mate: &[Option<usize>]) -> u64 {
    let mut total = 0;
    for (v, &e) in mate.iter().enumerate() {
        if let Some(e) = e {
            if g.endpoints(e).0 == v {
                total += g.edge_weight(e);
            }
        }
    }
    total
}

/// Maximum weight matching of a bipartite graph with sides `side`.
///
/// In [`SolverMode::Throttled`] the search is rerun and stopped at the first
/// augmentation whose weight is at least `(1 − λ)` of the optimum.
pub fn bipartite_mwm_sided(
    g: &WeightedGraph,
    side: &[bool],
    lambda: f64,
    mode: SolverMode,
) -> Result<BipartiteMatching> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return input(format!("λ = {lambda} must lie in (0, 1]"));
    }
    if side.len() != g.n() {
        return input(format!("{} sides for {} nodes", side.len(), g.n()));
    }
    if let Some(e) = g.edges().iter().position(|&(u, v)| side[u] == side[v]) {
        return input(format!("edge {e} joins two nodes of the same side"));
    }
    let (best, full) = successive_paths(g, side, |_| false);
    let optimum = best.weight(g);
    match mode {
        SolverMode::Exact => Ok(BipartiteMatching { matching: best, optimum, augmentations: full }),
        SolverMode::Throttled => {
            let target = (1.0 - lambda) * optimum as f64;
            let (matching, augmentations) = successive_paths(g, side, |w| w as f64 >= target);
            Ok(BipartiteMatching { matching, optimum, augmentations })
        }
    }
}

/// `(1 − λ)`-approximate maximum weight matching of a bipartite graph.
pub fn bipartite_mwm(g: &WeightedGraph, lambda: f64, mode: SolverMode) -> Result<Matching> {
    let Some(side) = g.two_coloring() else {
        return input("bipartite matching needs a bipartite graph");
    };
    Ok(bipartite_mwm_sided(g, &side, lambda, mode)?.matching)
}

/// Maximal matching taking edges by decreasing weight, ties by id.
pub fn greedy_matching(g: &WeightedGraph) -> Matching {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by_key(|&e| (Reverse(g.edge_weight(e)), e));
    let mut used = vec![false; g.n()];
    let mut edges = Vec::new();
    for e in order {
        let (u, v) = g.endpoints(e);
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            edges.push(e);
        }
    }
    Matching::new(g, edges).expect("greedy picks disjoint edges")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GenParams, GraphKind, WeightMode};
    use crate::oracle::exact_mwm;

    #[test]
    fn single_edge() {
        let g = WeightedGraph::edge_weighted(2, vec![(0, 1, 4)]).unwrap();
        assert_eq!(bipartite_mwm(&g, 0.5, SolverMode::Exact).unwrap().edges(), &[0]);
    }

    #[test]
    fn path_of_three_takes_one_edge() {
        let g = WeightedGraph::edge_weighted(3, vec![(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(bipartite_mwm(&g, 0.5, SolverMode::Exact).unwrap().weight(&g), 1);
    }

    #[test]
    fn prefers_weight_over_cardinality() {
        let g = WeightedGraph::edge_weighted(4, vec![(0, 1, 2), (1, 2, 5), (2, 3, 2)]).unwrap();
        let m = bipartite_mwm(&g, 0.1, SolverMode::Exact).unwrap();
        assert_eq!(m.edges(), &[1]);
    }

    #[test]
    fn odd_cycle_rejected() {
        let g = WeightedGraph::edge_weighted(3, vec![(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert!(bipartite_mwm(&g, 0.5, SolverMode::Exact).is_err());
        let p = WeightedGraph::edge_weighted(2, vec![(0, 1, 1)]).unwrap();
        assert!(bipartite_mwm(&p, 0.0, SolverMode::Exact).is_err());
    }

    #[test]
    fn matches_oracle_on_random_bipartite() {
        for seed in 0..60 {
            let kind = GraphKind::RandomBipartite { left: 7, right: 8, p: 0.35 };
            let params = GenParams { max_weight: 20, mode: WeightMode::Edge };
            let g = generate(&kind, &params, seed).unwrap();
            let opt = exact_mwm(&g).unwrap().weight(&g);
            assert_eq!(bipartite_mwm(&g, 0.05, SolverMode::Exact).unwrap().weight(&g), opt, "seed {seed}");
            let t = bipartite_mwm(&g, 0.05, SolverMode::Throttled).unwrap().weight(&g);
            assert!(t as f64 >= 0.95 * opt as f64 && t <= opt, "seed {seed}");
        }
    }

    #[test]
    fn greedy_is_half_approximate() {
        let g = WeightedGraph::edge_weighted(4, vec![(0, 1, 2), (1, 2, 3), (2, 3, 2)]).unwrap();
        assert_eq!(greedy_matching(&g).edges(), &[1]);
    }
}
