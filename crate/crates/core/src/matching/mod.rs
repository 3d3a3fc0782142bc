//! `(1 − ε)`-approximate maximum weight matching: augmenting structures,
//! sampled bipartitions, and the randomized and deterministic improvement
//! loops run per cluster after diameter reduction.

mod family;
mod sampling;
mod solver;
mod structures;

pub use family::{build_bipartition_family, family_size, BipartitionFamily, EXHAUSTIVE_LIMIT, SPOT_CHECKS};
pub use sampling::{sample_bipartition, SampledBipartition};
pub use solver::{bipartite_mwm, bipartite_mwm_sided, greedy_matching, BipartiteMatching, SolverMode};
pub use structures::{
    apply_augmentations, decompose_short_augmentations, AugmentingStructure, Decomposition, StructureKind,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bipartite::{dense_clustering, region_owner, DEFAULT_CLUSTER_ATTEMPTS};
use crate::error::{input, invariant, Result};
use crate::fractional::{local_ratio_dual_cover, scaled_param, DualCover, PARAM_SCALE};
use crate::graph::{Matching, Subgraph, WeightedGraph};
use crate::sim::{
    bit_len, cluster_leader_solve, log2_ceil, Clustering, ElementWeights, LeaderOutput, RoundStats, SimConfig,
    DEFAULT_GATHER_CAPACITY,
};

/// Upper limit on randomized iterations when none is given.
pub const ITERATION_CAP: usize = 64;
/// Default cap on the family sequence length `k`.
pub const DEFAULT_FAMILY_K: usize = 6;
/// Stages per `T/ε` in the deterministic loop.
pub const STAGE_FACTOR: f64 = 16.0;

/// Structure length bound `ℓ = ⌈24/ε⌉ + 6`.
pub fn piece_length(epsilon: f64) -> usize {
    (24.0 / epsilon).ceil() as usize + 6
}

/// Per-iteration success probability `c(ε) = (ε/8)·2^{−ℓ}`.
pub fn sampling_constant(epsilon: f64) -> f64 {
    epsilon / 8.0 * 2f64.powi(-(piece_length(epsilon) as i32))
}

/// `⌈16/c(ε)² · ln(1/δ)⌉`, saturating.
pub fn randomized_iterations(epsilon: f64, delta: f64) -> usize {
    let c = sampling_constant(epsilon);
    let t = (16.0 / (c * c) * (1.0 / delta).ln()).ceil();
    if t.is_finite() && t < usize::MAX as f64 {
        (t as usize).max(1)
    } else {
        usize::MAX
    }
}

/// Parameters of [`mwm_randomized`] and [`mwm_deterministic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwmConfig {
    pub epsilon: f64,
    /// Failure probability of the randomized loop.
    pub delta: f64,
    pub seed: u64,
    /// Randomized iterations; `None` uses the formula capped at [`ITERATION_CAP`].
    pub iterations: Option<usize>,
    /// Cap on the family sequence length of the deterministic loop.
    pub family_k: usize,
    pub solver: SolverMode,
    pub sim: SimConfig,
    pub gather_capacity: usize,
    pub cluster_attempts: u32,
}

impl MwmConfig {
    pub fn new(g: &WeightedGraph, epsilon: f64, delta: f64, seed: u64) -> Self {
        MwmConfig {
            epsilon,
            delta,
            seed,
            iterations: None,
            family_k: DEFAULT_FAMILY_K,
            solver: SolverMode::Exact,
            sim: SimConfig::for_graph(g).with_seed(seed),
            gather_capacity: DEFAULT_GATHER_CAPACITY,
            cluster_attempts: DEFAULT_CLUSTER_ATTEMPTS,
        }
    }

    fn validate(&self, g: &WeightedGraph, eps_max: f64) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= eps_max) {
            return input(format!("ε must lie in (0, {eps_max}], got {}", self.epsilon));
        }
        if self.cluster_attempts == 0 {
            return input("at least one clustering attempt is required");
        }
        if self.iterations == Some(0) {
            return input("iteration count must be positive");
        }
        g.require_edge_weights("maximum weight matching")?;
        Ok(())
    }

    /// Randomized iteration count `T`.
    pub fn randomized_iterations(&self) -> usize {
        self.iterations
            .unwrap_or_else(|| randomized_iterations(self.epsilon, self.delta).min(ITERATION_CAP))
    }
}

/// One step of an improvement loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRow {
    /// 0 is the initial matching.
    pub iteration: usize,
    pub weight: u64,
    /// Whether any region replaced its matching.
    pub accepted: bool,
    /// Index of the family function used, deterministic loop only.
    pub bipartition: Option<usize>,
}

/// Family parameters used by the deterministic loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyInfo {
    pub n: usize,
    pub k: usize,
    pub size: usize,
    pub exhaustive: bool,
}

/// Output of an improvement loop.
#[derive(Debug, Clone, PartialEq)]
pub struct MwmReport {
    pub matching: Matching,
    /// Union of the per-region greedy matchings.
    pub initial: Matching,
    pub trace: Vec<TraceRow>,
    pub stats: RoundStats,
    /// Node values weighting the clustering.
    pub dual: DualCover,
    pub clustering: Clustering,
    pub cluster_attempts: u32,
    pub density_target_met: bool,
    pub regions: Vec<Vec<usize>>,
    pub lambda: f64,
    /// `T`: iterations (randomized) or family size (deterministic).
    pub iterations: usize,
    pub family: Option<FamilyInfo>,
}

/// `⌈log* n⌉`.
fn log_star(n: usize) -> u64 {
    let mut x = n as f64;
    let mut k = 0;
    while x > 1.0 {
        x = x.log2();
        k += 1;
    }
    k
}

/// Rounds cited for one `(1 − λ)` bipartite matching call on `g`:
/// `log(ΔW)/λ² + (log²(Δ/λ) + log* n)/λ`.
fn matching_call_rounds(g: &WeightedGraph, lambda: f64) -> f64 {
    let degree = g.max_degree().max(1) as f64;
    let spread = (degree * g.max_weight().max(1) as f64 + 1.0).log2();
    let local = (degree / lambda).log2().max(1.0);
    (spread / (lambda * lambda)).ceil() + ((local * local + log_star(g.n()) as f64) / lambda).ceil()
}

fn saturate(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.max(0.0) as u64
    }
}

/// One region's gathered subgraph and current matching.
struct RegionState {
    sub: Subgraph,
    matching: Matching,
    weight: u64,
    idle_passes: u32,
}

impl RegionState {
    /// Runs one sampled improvement with region-local colors and returns the
    /// candidate matching and the optimum of the sampled bipartite graph.
    fn candidate(&self, colors: &[bool], lambda: f64, mode: SolverMode) -> Result<(Matching, u64)> {
        let g = &self.sub.graph;
        let local: Vec<bool> = self.sub.nodes.iter().map(|&v| colors[v]).collect();
        let sample = sample_bipartition(g, &self.matching, local)?;
        let h = sample.subgraph(g)?;
        let solved = bipartite_mwm_sided(&h.graph, &sample.color, lambda, mode)?;
        let chosen: Vec<usize> = solved.matching.edges().iter().map(|&e| h.edges[e]).collect();
        Ok((sample.combine(g, &chosen)?, solved.optimum))
    }
}

/// Shared setup: dual cover, clustering, gathering.
struct Prepared {
    dual: DualCover,
    clustering: Clustering,
    cluster_attempts: u32,
    density_target_met: bool,
    regions: Vec<Vec<usize>>,
    states: Vec<RegionState>,
    stats: RoundStats,
}

fn prepare(g: &WeightedGraph, config: &MwmConfig, calls: f64, lambda: f64) -> Result<Prepared> {
    let dual = local_ratio_dual_cover(g)?;
    let weights = ElementWeights::nodes(g, dual.values().iter().map(|&x| u128::from(x)).collect())?;
    let eta = config.epsilon / 8.0;
    let (clustering, cluster_attempts, density_target_met) =
        dense_clustering(g, &weights, eta, config.cluster_attempts, config.seed)?;
    clustering.audit(g)?;
    let regions: Vec<Vec<usize>> = (0..clustering.clusters.len()).map(|i| clustering.extended(g, i)).collect();
    region_owner(g.n(), &regions)?;
    let id_bits = bit_len(g.n() as u128);
    let gathered = cluster_leader_solve(g, &clustering, &regions, config.gather_capacity, &config.sim, |i, sub| {
        let greedy = matching_call_rounds(&sub.graph, 0.5);
        let loops = calls * matching_call_rounds(&sub.graph, lambda);
        let tree = clustering.trees[i].diameter() as f64;
        Ok(LeaderOutput {
            value: sub.clone(),
            cited_rounds: saturate(greedy + loops + tree),
            result_bits: sub.graph.n() * id_bits,
        })
    })?;
    let states = gathered
        .outputs
        .into_iter()
        .map(|sub| {
            let matching = greedy_matching(&sub.graph);
            let weight = matching.weight(&sub.graph);
            RegionState { sub, matching, weight, idle_passes: 0 }
        })
        .collect();
    // The local-ratio values are cited at one round per weight scale.
    let dual_rounds = log2_ceil((g.max_degree().max(1) as u64 * g.max_weight().max(1)) as usize) as u64 + 1;
    let stats = RoundStats::accounted(dual_rounds, &config.sim)
        .then(RoundStats::accounted(clustering.rounds, &config.sim))
        .then(gathered.stats);
    Ok(Prepared { dual, clustering, cluster_attempts, density_target_met, regions, states, stats })
}

fn union(g: &WeightedGraph, states: &[RegionState]) -> Result<Matching> {
    let edges = states
        .iter()
        .flat_map(|s| s.matching.edges().iter().map(|&e| s.sub.edges[e]))
        .collect();
    Matching::new(g, edges)
}

fn total_weight(states: &[RegionState]) -> u64 {
    states.iter().map(|s| s.weight).sum()
}

fn report(
    g: &WeightedGraph,
    prepared: Prepared,
    initial: Matching,
    trace: Vec<TraceRow>,
    lambda: f64,
    iterations: usize,
    family: Option<FamilyInfo>,
) -> Result<MwmReport> {
    let matching = union(g, &prepared.states)?;
    if trace.last().is_some_and(|r| r.weight != matching.weight(g)) {
        return invariant("final matching weight differs from the trace");
    }
    Ok(MwmReport {
        matching,
        initial,
        trace,
        stats: prepared.stats,
        dual: prepared.dual,
        clustering: prepared.clustering,
        cluster_attempts: prepared.cluster_attempts,
        density_target_met: prepared.density_target_met,
        regions: prepared.regions,
        lambda,
        iterations,
        family,
    })
}

/// Randomized `(1 − ε)`-approximate maximum weight matching.
///
/// After clustering by local-ratio node values with density `1 − ε/8`, each
/// region starts from a greedy matching and runs `T` iterations: color the
/// nodes by fair coins, keep the bipartite sample, and replace the matching
/// by a `(1 − λ)`-approximate matching of the sample plus the carried edges,
/// with `λ = ε/(2T)`. Edges between regions are dropped.
pub fn mwm_randomized(g: &WeightedGraph, config: &MwmConfig) -> Result<MwmReport> {
    config.validate(g, 0.5)?;
    if !(config.delta > 0.0 && config.delta <= 0.5) {
        return input(format!("δ must lie in (0, 1/2], got {}", config.delta));
    }
    let t = config.randomized_iterations();
    let lambda = config.epsilon / (2.0 * t as f64);
    let lambda_num = scaled_param(lambda);
    let mut prepared = prepare(g, config, t as f64, lambda)?;
    let initial = union(g, &prepared.states)?;
    let mut trace = vec![TraceRow { iteration: 0, weight: total_weight(&prepared.states), accepted: true, bipartition: None }];
    for it in 1..=t {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (it as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let colors: Vec<bool> = (0..g.n()).map(|_| rng.random()).collect();
        for state in &mut prepared.states {
            let (next, optimum) = state.candidate(&colors, lambda, config.solver)?;
            let weight = next.weight(&state.sub.graph);
            // w(M_i) ≥ w(M_{i−1}) − λ·w*(H_i).
            let loss = i128::from(state.weight) - i128::from(weight);
            if loss * PARAM_SCALE > lambda_num * i128::from(optimum) {
                return invariant(format!("iteration {it} lost {loss} against λ·{optimum}"));
            }
            state.matching = next;
            state.weight = weight;
        }
        trace.push(TraceRow { iteration: it, weight: total_weight(&prepared.states), accepted: true, bipartition: None });
    }
    report(g, prepared, initial, trace, lambda, t, None)
}

/// Deterministic `(1 − ε)`-approximate maximum weight matching.
///
/// Nodes carry ids `1..=n`. A bipartition family for sequences of length
/// `k = min(family_k, n)` with `T` functions drives up to `⌈16·T/ε⌉` stages;
/// each stage tries every function with `λ = ε/(8T)` and keeps a candidate
/// only if it gains at least `(ε/(8T))·w(M)`. A region stops after two
/// consecutive stages without a kept candidate.
pub fn mwm_deterministic(g: &WeightedGraph, config: &MwmConfig) -> Result<MwmReport> {
    config.validate(g, 1.0)?;
    if config.family_k == 0 {
        return input("family sequence length must be positive");
    }
    let family = if g.n() > 0 {
        Some(build_bipartition_family(g.n(), config.family_k.min(g.n()), config.seed)?)
    } else {
        None
    };
    let t = family.as_ref().map_or(1, BipartitionFamily::len);
    let lambda = config.epsilon / (8.0 * t as f64);
    let stages = (STAGE_FACTOR * t as f64 / config.epsilon).ceil();
    let mut prepared = prepare(g, config, stages * t as f64, lambda)?;
    let initial = union(g, &prepared.states)?;
    let eps_num = scaled_param(config.epsilon);
    let mut trace = vec![TraceRow { iteration: 0, weight: total_weight(&prepared.states), accepted: true, bipartition: None }];
    if let Some(family) = &family {
        let mut step = 0;
        for _ in 0..saturate(stages) {
            if prepared.states.iter().all(|s| s.idle_passes >= 2) {
                break;
            }
            let mut accepted_in_stage = vec![false; prepared.states.len()];
            for i in 0..family.len() {
                let mut accepted = false;
                for (r, state) in prepared.states.iter_mut().enumerate() {
                    if state.idle_passes >= 2 {
                        continue;
                    }
                    let (next, _) = state.candidate(family.function(i), lambda, config.solver)?;
                    let weight = next.weight(&state.sub.graph);
                    let gain = i128::from(weight) - i128::from(state.weight);
                    // Keep iff gain ≥ ε/(8T)·w(M).
                    let keep = gain > 0
                        && gain * 8 * t as i128 * PARAM_SCALE >= eps_num * i128::from(state.weight);
                    if keep {
                        state.matching = next;
                        state.weight = weight;
                        accepted = true;
                        accepted_in_stage[r] = true;
                    }
                }
                step += 1;
                trace.push(TraceRow {
                    iteration: step,
                    weight: total_weight(&prepared.states),
                    accepted,
                    bipartition: Some(i),
                });
            }
            for (state, &acc) in prepared.states.iter_mut().zip(&accepted_in_stage) {
                state.idle_passes = if acc { 0 } else { state.idle_passes + 1 };
            }
        }
    }
    let info = family.as_ref().map(|f| FamilyInfo { n: f.n(), k: f.k(), size: f.len(), exhaustive: f.exhaustive() });
    report(g, prepared, initial, trace, lambda, t, info)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GenParams, GraphKind, WeightMode};
    use crate::oracle::exact_mwm;

    fn c4() -> WeightedGraph {
        WeightedGraph::edge_weighted(4, vec![(0, 1, 3), (1, 2, 1), (2, 3, 3), (3, 0, 1)]).unwrap()
    }

    #[test]
    fn single_edge_is_matched_at_start() {
        let g = WeightedGraph::edge_weighted(2, vec![(0, 1, 7)]).unwrap();
        let r = mwm_randomized(&g, &MwmConfig::new(&g, 0.3, 0.25, 1)).unwrap();
        assert_eq!(r.initial.edges(), &[0]);
        assert_eq!(r.matching.edges(), &[0]);
        let d = mwm_deterministic(&g, &MwmConfig::new(&g, 0.25, 0.25, 1)).unwrap();
        assert_eq!(d.matching.edges(), &[0]);
    }

    #[test]
    fn deterministic_four_cycle_reaches_optimum() {
        let g = c4();
        let r = mwm_deterministic(&g, &MwmConfig::new(&g, 0.25, 0.25, 0)).unwrap();
        assert_eq!(r.matching.weight(&g), 6);
        assert!(r.trace.windows(2).all(|w| w[0].weight <= w[1].weight));
    }

    #[test]
    fn randomized_four_cycle_usually_optimal() {
        let g = c4();
        let hits = (0..40)
            .filter(|&s| mwm_randomized(&g, &MwmConfig::new(&g, 0.3, 0.25, s)).unwrap().matching.weight(&g) == 6)
            .count();
        assert!(hits >= 30, "{hits}");
    }

    #[test]
    fn random_graphs_within_bound() {
        for seed in 0..10 {
            let kind = GraphKind::RandomGeneral { n: 10, p: 0.4 };
            let g = generate(&kind, &GenParams { max_weight: 16, mode: WeightMode::Edge }, seed).unwrap();
            let opt = exact_mwm(&g).unwrap().weight(&g) as f64;
            let r = mwm_deterministic(&g, &MwmConfig::new(&g, 0.25, 0.25, seed)).unwrap();
            assert!(r.matching.weight(&g) as f64 >= 0.75 * opt, "seed {seed}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = c4();
        assert!(mwm_randomized(&g, &MwmConfig::new(&g, 0.7, 0.25, 0)).is_err());
        assert!(mwm_randomized(&g, &MwmConfig::new(&g, 0.3, 0.0, 0)).is_err());
        let unit = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        assert!(mwm_deterministic(&unit, &MwmConfig::new(&unit, 0.3, 0.25, 0)).is_err());
    }

    #[test]
    fn iteration_formula_is_capped() {
        assert_eq!(piece_length(0.3), 86);
        let g = c4();
        assert_eq!(MwmConfig::new(&g, 0.3, 0.25, 0).randomized_iterations(), ITERATION_CAP);
    }
}
