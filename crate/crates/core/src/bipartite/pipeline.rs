//! End-to-end `(1 + ε)` weighted vertex cover on bipartite graphs:
//! doubling matching, clustering, per-region exact-arithmetic solve, and a
//! patch for edges left outside every region.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{eliminate_stage, extract_cover, EliminationSelection, LevelDecomposition};
use crate::error::{input, invariant, Result};
use crate::fractional::{
    approx_w_matching_bipartite, doubling_w_matching, product_le, scaled_param, ApproxMatching,
    FractionalAssignment, PARAM_SCALE,
};
use crate::graph::{CoverSolution, WeightedGraph};
use crate::sim::{
    bit_len, cluster, cluster_leader_solve, log2_ceil, Clustering, ElementWeights, LeaderOutput,
    RoundStats, SimConfig, DEFAULT_GATHER_CAPACITY,
};

/// Separation between clusters; extended clusters stay disjoint.
pub const CLUSTER_SEPARATION: usize = 3;
/// Clustering attempts before settling for the densest one.
pub const DEFAULT_CLUSTER_ATTEMPTS: u32 = 32;
/// Halvings of `δ` tried before solving the region exactly.
const DELTA_HALVINGS: u32 = 8;

/// Parameters of [`mwvc_bipartite_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverConfig {
    pub epsilon: f64,
    pub seed: u64,
    pub sim: SimConfig,
    /// Maximum number of edges a cluster leader gathers.
    pub gather_capacity: usize,
    pub cluster_attempts: u32,
}

impl CoverConfig {
    pub fn new(g: &WeightedGraph, epsilon: f64, seed: u64) -> Self {
        CoverConfig {
            epsilon,
            seed,
            sim: SimConfig::for_graph(g).with_seed(seed),
            gather_capacity: DEFAULT_GATHER_CAPACITY,
            cluster_attempts: DEFAULT_CLUSTER_ATTEMPTS,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return input(format!("ε must lie in (0, 1], got {}", self.epsilon));
        }
        if self.cluster_attempts == 0 {
            return input("at least one clustering attempt is required");
        }
        Ok(())
    }
}

/// Result of solving one bipartite region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSolution {
    pub cover: CoverSolution,
    /// The near-optimal matching the stages started from.
    pub matching: ApproxMatching,
    /// Selections of stages `d = 1, 3, .., 2k − 1`.
    pub stages: Vec<EliminationSelection>,
    /// Matching and capacities after all stages.
    pub reduced: FractionalAssignment,
    pub levels: LevelDecomposition,
    /// `δ` of the accepted attempt; 0 means solved exactly.
    pub delta: f64,
    pub k: usize,
}

impl RegionSolution {
    /// Numerator of `s(X) + y(F)` over all stages.
    pub fn elimination_cost(&self) -> i128 {
        self.stages.iter().map(EliminationSelection::cost).sum()
    }

    /// `y(E)` numerator of the starting matching.
    pub fn value(&self) -> i128 {
        self.matching.assignment.total_num()
    }
}

/// Level count `k = ⌈2/ε⌉` and starting `δ = ε⁴/512` for target `ε`.
pub fn region_parameters(epsilon: f64) -> (usize, f64) {
    ((2.0 / epsilon).ceil() as usize, epsilon.powi(4) / 512.0)
}

/// `(1 + ε)`-approximate cover of a bipartite graph with a known side split.
///
/// Runs a `(1 − δ)`-approximate matching, stages `d = 1, 3, .., 2k − 1`,
/// and the level extraction. Accepts when `s(X) + y(F) ≤ (ε/2)·y(E)`;
/// otherwise halves `δ`, ending with an exact matching that needs no
/// elimination. Checks `w(S) ≤ (1 + ε)·y(E)`.
pub fn solve_region(g: &WeightedGraph, side: &[bool], epsilon: f64) -> Result<RegionSolution> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return input(format!("ε must lie in (0, 1], got {epsilon}"));
    }
    let (k, start) = region_parameters(epsilon);
    let eps_num = scaled_param(epsilon);
    let deltas = (0..DELTA_HALVINGS)
        .map(|i| start / f64::from(1u32 << i))
        .chain(std::iter::once(0.0));
    for delta in deltas {
        let matching = approx_w_matching_bipartite(g, side, delta)?;
        let mut reduced = matching.assignment.clone();
        let mut stages = Vec::with_capacity(k);
        for d in (1..2 * k).step_by(2) {
            stages.push(eliminate_stage(g, side, &mut reduced, d)?);
        }
        let cost: i128 = stages.iter().map(EliminationSelection::cost).sum();
        let value = matching.assignment.total_num();
        if !product_le(2 * cost, PARAM_SCALE, eps_num, value) {
            if delta == 0.0 {
                return invariant("exact matching still needed elimination");
            }
            continue;
        }
        let (cover, levels) = extract_cover(g, side, &reduced, k)?;
        let weight = i128::from(cover.weight(g)) * matching.assignment.denominator();
        if !product_le(weight, PARAM_SCALE, PARAM_SCALE + eps_num, value) {
            return invariant(format!(
                "region cover weight exceeds (1 + {epsilon})·y(E)"
            ));
        }
        return Ok(RegionSolution {
            cover,
            matching,
            stages,
            reduced,
            levels,
            delta,
            k,
        });
    }
    invariant("no δ attempt was accepted")
}

/// Output of [`mwvc_bipartite_pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteReport {
    pub cover: CoverSolution,
    pub stats: RoundStats,
    /// Doubling matching used for clustering weights and the patch.
    pub doubling: FractionalAssignment,
    pub clustering: Clustering,
    pub cluster_attempts: u32,
    /// Density reached `1 − ε/8`.
    pub density_target_met: bool,
    /// Extended clusters, sorted node lists of the input graph.
    pub regions: Vec<Vec<usize>>,
    /// Per region, in the region's local node ids.
    pub region_solutions: Vec<RegionSolution>,
    /// Nodes added to cover edges outside every region.
    pub patched: Vec<usize>,
}

/// Clustering weights from an assignment's numerators.
fn edge_weights(g: &WeightedGraph, a: &FractionalAssignment) -> Result<ElementWeights> {
    ElementWeights::edges(g, a.y_nums().iter().map(|&y| y.max(0) as u128).collect())
}

/// Clusters with up to `attempts` seeds, stopping at density `1 − eta`;
/// returns the densest clustering, the attempts used and whether it met
/// the target.
pub(crate) fn dense_clustering(
    g: &WeightedGraph,
    weights: &ElementWeights,
    eta: f64,
    attempts: u32,
    seed: u64,
) -> Result<(Clustering, u32, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Clustering> = None;
    for attempt in 1..=attempts {
        let c = cluster(g, weights, CLUSTER_SEPARATION, eta, rng.next_u64())?;
        if c.density >= 1.0 - eta {
            return Ok((c, attempt, true));
        }
        if best.as_ref().is_none_or(|b| c.density > b.density) {
            best = Some(c);
        }
    }
    match best {
        Some(b) => Ok((b, attempts, false)),
        None => input("at least one clustering attempt is required"),
    }
}

/// Node-disjoint regions as an owner map; errors when two regions overlap.
pub(crate) fn region_owner(n: usize, regions: &[Vec<usize>]) -> Result<Vec<Option<usize>>> {
    let mut owner = vec![None; n];
    for (i, r) in regions.iter().enumerate() {
        for &v in r {
            if owner[v].replace(i).is_some() {
                return invariant(format!("node {v} lies in two extended clusters"));
            }
        }
    }
    Ok(owner)
}

/// Rounds cited for one region: the matching, the stages and extraction.
fn region_cited_rounds(sub: &WeightedGraph, epsilon: f64, tree_diameter: usize) -> u64 {
    let (k, delta) = region_parameters(epsilon);
    let spread = (sub.max_degree().max(1) as f64) * (sub.max_weight() as f64) + 1.0;
    let matching = (spread.log2() / (delta * delta)).ceil();
    let matching = if matching >= u64::MAX as f64 { u64::MAX } else { matching as u64 };
    let log_n = log2_ceil(sub.n()).max(1) as u64;
    let stages = (1..2 * k as u64)
        .step_by(2)
        .fold(0u64, |acc, d| acc.saturating_add(d.saturating_pow(4).saturating_mul(log_n)));
    matching
        .saturating_add(stages)
        .saturating_add(tree_diameter as u64 + k as u64)
}

/// `(1 + ε)`-approximate minimum weight vertex cover of a bipartite graph.
///
/// The doubling matching weights the edges for a clustering of density
/// `1 − ε/8` with 3-hop separation. Each extended cluster is solved at its
/// leader with target `ε/2`. Edges outside every extended cluster get a
/// half-tight endpoint, which costs at most `4·y(outside) ≤ (ε/2)·y(E)`.
pub fn mwvc_bipartite_pipeline(g: &WeightedGraph, config: &CoverConfig) -> Result<BipartiteReport> {
    config.validate()?;
    g.require_node_weights("bipartite vertex cover")?;
    if !g.is_bipartite() {
        return input("bipartite vertex cover needs a bipartite graph");
    }
    let eps = config.epsilon;
    let eta = eps / 8.0;
    let inner = eps / 2.0;

    let doubling = doubling_w_matching(g, &config.sim)?;
    let weights = edge_weights(g, &doubling.assignment)?;
    let (clustering, cluster_attempts, density_target_met) =
        dense_clustering(g, &weights, eta, config.cluster_attempts, config.seed)?;
    clustering.audit(g)?;
    let regions: Vec<Vec<usize>> = (0..clustering.clusters.len())
        .map(|i| clustering.extended(g, i))
        .collect();
    let owner = region_owner(g.n(), &regions)?;

    let id_bits = bit_len(g.n() as u128);
    let solved = cluster_leader_solve(
        g,
        &clustering,
        &regions,
        config.gather_capacity,
        &config.sim,
        |i, sub| {
            let side = sub
                .graph
                .two_coloring()
                .ok_or_else(|| crate::Error::Invariant("region is not bipartite".into()))?;
            let sol = solve_region(&sub.graph, &side, inner)?;
            Ok(LeaderOutput {
                cited_rounds: region_cited_rounds(&sub.graph, inner, clustering.trees[i].diameter()),
                result_bits: sol.cover.len() * id_bits,
                value: sol,
            })
        },
    )?;

    let mut in_cover = vec![false; g.n()];
    for (region, sol) in regions.iter().zip(&solved.outputs) {
        for &v in sol.cover.nodes() {
            in_cover[region[v]] = true;
        }
    }
    let a = &doubling.assignment;
    let mut patched = Vec::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if in_cover[u] || in_cover[v] {
            continue;
        }
        if owner[u].is_some() && owner[u] == owner[v] {
            return invariant(format!("edge {e} inside a region is uncovered"));
        }
        let pick = match (a.is_half_tight(g, u), a.is_half_tight(g, v)) {
            (true, true) => {
                if (g.node_weight(v), v) < (g.node_weight(u), u) {
                    v
                } else {
                    u
                }
            }
            (true, false) => u,
            (false, true) => v,
            (false, false) => return invariant(format!("edge {e} has no half-tight endpoint")),
        };
        in_cover[pick] = true;
        patched.push(pick);
    }
    patched.sort_unstable();
    let outside: i128 = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(_, &(u, v))| clustering.owner[u].is_none() || clustering.owner[u] != clustering.owner[v])
        .map(|(e, _)| a.y_num(e))
        .sum();
    let patch_weight = i128::from(g.weight_of(&patched)) * a.denominator();
    if patch_weight > 4 * outside {
        return invariant("patch weight exceeds four times the outside value");
    }

    let cover = CoverSolution::new(g, (0..g.n()).filter(|&v| in_cover[v]).collect())?;
    if let Some(e) = cover.uncovered_edge(g) {
        return invariant(format!("pipeline output misses edge {e}"));
    }
    let patch_round = RoundStats {
        rounds: 1,
        rounds_cited: 1,
        max_bits_per_message: usize::from(g.m() > 0),
        messages_sent: 2 * g.m() as u64,
        bit_budget: config.sim.bit_budget,
    };
    let stats = doubling
        .stats
        .then(RoundStats::accounted(clustering.rounds, &config.sim))
        .then(solved.stats)
        .then(patch_round);
    Ok(BipartiteReport {
        cover,
        stats,
        doubling: doubling.assignment,
        clustering,
        cluster_attempts,
        density_target_met,
        regions,
        region_solutions: solved.outputs,
        patched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_mwvc;

    fn run(g: &WeightedGraph, eps: f64) -> BipartiteReport {
        mwvc_bipartite_pipeline(g, &CoverConfig::new(g, eps, 1)).unwrap()
    }

    #[test]
    fn star_takes_center() {
        let g = WeightedGraph::unit(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = run(&g, 0.5);
        assert_eq!(r.cover.nodes(), &[0]);
    }

    #[test]
    fn complete_bipartite_takes_light_side() {
        let mut edges = Vec::new();
        for a in 0..3 {
            for b in 3..6 {
                edges.push((a, b));
            }
        }
        let g = WeightedGraph::node_weighted(6, edges, vec![1, 1, 1, 10, 10, 10]).unwrap();
        let r = run(&g, 0.2);
        assert_eq!(r.cover.nodes(), &[0, 1, 2]);
        assert_eq!(r.cover.weight(&g), exact_mwvc(&g).unwrap().weight(&g));
    }

    #[test]
    fn solve_region_meets_target_on_path() {
        let g = WeightedGraph::node_weighted(5, vec![(0, 1), (1, 2), (2, 3), (3, 4)], vec![3, 5, 2, 4, 1])
            .unwrap();
        let side: Vec<bool> = (0..5).map(|v| v % 2 == 1).collect();
        let sol = solve_region(&g, &side, 0.25).unwrap();
        assert!(sol.cover.is_cover(&g));
        let opt = exact_mwvc(&g).unwrap().weight(&g);
        assert!(sol.cover.weight(&g) as f64 <= 1.25 * opt as f64);
        assert_eq!(sol.k, 8);
    }

    #[test]
    fn rejects_non_bipartite_and_bad_epsilon() {
        let tri = WeightedGraph::unit(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(mwvc_bipartite_pipeline(&tri, &CoverConfig::new(&tri, 0.5, 0)).is_err());
        let g = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        assert!(mwvc_bipartite_pipeline(&g, &CoverConfig::new(&g, 0.0, 0)).is_err());
    }

    #[test]
    fn edgeless_graph_has_empty_cover() {
        let g = WeightedGraph::unit(3, vec![]).unwrap();
        let r = run(&g, 0.5);
        assert!(r.cover.is_empty());
    }
}
