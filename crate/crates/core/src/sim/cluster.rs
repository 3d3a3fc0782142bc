//! Randomized low-diameter clustering with h-hop separation, and the
//! gather/solve/scatter stand-in for supported-CONGEST subroutines.
//!
//! Every node `c` draws a delay `δ_c ~ Exp(β)` (truncated at
//! `8·ln(n+1)/β`). Node `u` ranks centers by `dist(c, u) − δ_c` and joins
//! the best one. It stays clustered only if the runner-up is more than
//! `h − 1` behind, which keeps kept nodes of different clusters at least `h`
//! hops apart. Kept clusters are star-convex around their center, so the
//! shortest-path tree from the center stays inside the cluster.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::{bit_len, log2_ceil, RootedTree, RoundStats, SimConfig};
use crate::error::{input, invariant, Error, Result};
use crate::graph::{Subgraph, WeightedGraph};

/// Default bound on the number of edges a leader may gather.
pub const DEFAULT_GATHER_CAPACITY: usize = 1 << 20;

/// Non-negative weights on nodes and edges used to measure density.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementWeights {
    pub node: Vec<u128>,
    pub edge: Vec<u128>,
}

impl ElementWeights {
    /// Weight 1 on every node and every edge.
    pub fn unit(g: &WeightedGraph) -> Self {
        ElementWeights {
            node: vec![1; g.n()],
            edge: vec![1; g.m()],
        }
    }

    /// Weights on nodes only.
    pub fn nodes(g: &WeightedGraph, node: Vec<u128>) -> Result<Self> {
        if node.len() != g.n() {
            return input("one weight per node required");
        }
        Ok(ElementWeights {
            node,
            edge: vec![0; g.m()],
        })
    }

    /// Weights on edges only.
    pub fn edges(g: &WeightedGraph, edge: Vec<u128>) -> Result<Self> {
        if edge.len() != g.m() {
            return input("one weight per edge required");
        }
        Ok(ElementWeights {
            node: vec![0; g.n()],
            edge,
        })
    }

    pub fn total(&self) -> u128 {
        self.node.iter().chain(&self.edge).sum()
    }
}

/// Disjoint clusters with routing trees.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Sorted node sets.
    pub clusters: Vec<Vec<usize>>,
    /// One tree per cluster, rooted at the cluster center.
    pub trees: Vec<RootedTree>,
    /// Cluster index per node, `None` for unclustered nodes.
    pub owner: Vec<Option<usize>>,
    pub h: usize,
    /// Weight inside clusters over total weight; 1 when the total is 0.
    pub density: f64,
    pub inside_weight: u128,
    pub total_weight: u128,
    /// Maximum number of trees sharing a graph edge.
    pub congestion: usize,
    /// Maximum tree diameter.
    pub tree_diameter: usize,
    /// Rounds of the distributed growth process.
    pub rounds: u64,
}

#[derive(Clone, Copy, PartialEq)]
struct Label {
    key: f64,
    delay: f64,
    source: usize,
}

impl Label {
    /// Smaller is better: lower key, then larger delay, then smaller id.
    fn cmp_rank(&self, other: &Label) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.delay.total_cmp(&self.delay))
            .then_with(|| self.source.cmp(&other.source))
    }
}

struct Entry(Label, usize);

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap.
        other
            .0
            .cmp_rank(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

/// The two best distinct-source labels per node.
fn top_two(g: &WeightedGraph, delays: &[f64]) -> Vec<Vec<Label>> {
    let mut labels: Vec<Vec<Label>> = vec![Vec::with_capacity(2); g.n()];
    let mut heap = BinaryHeap::new();
    for (c, &d) in delays.iter().enumerate() {
        heap.push(Entry(
            Label {
                key: -d,
                delay: d,
                source: c,
            },
            c,
        ));
    }
    while let Some(Entry(label, v)) = heap.pop() {
        let have = &mut labels[v];
        if have.len() == 2 || have.iter().any(|l| l.source == label.source) {
            continue;
        }
        have.push(label);
        for &(u, _) in g.neighbors(v) {
            if labels[u].len() < 2 {
                heap.push(Entry(
                    Label {
                        key: label.key + 1.0,
                        ..label
                    },
                    u,
                ));
            }
        }
    }
    labels
}

/// Shortest-path tree from `root` restricted to `members`.
fn bfs_inside(g: &WeightedGraph, root: usize, members: &[bool]) -> RootedTree {
    let mut parent = vec![None; g.n()];
    let mut depth = vec![None; g.n()];
    depth[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let dv = depth[v].unwrap_or(0);
        for &(u, _) in g.neighbors(v) {
            if members[u] && depth[u].is_none() {
                depth[u] = Some(dv + 1);
                parent[u] = Some(v);
                queue.push_back(u);
            }
        }
    }
    RootedTree {
        root,
        parent,
        depth,
    }
}

/// Weight of nodes in clusters plus edges with both endpoints in one cluster.
pub(crate) fn inside_weight(g: &WeightedGraph, owner: &[Option<usize>], w: &ElementWeights) -> u128 {
    let nodes: u128 = (0..g.n())
        .filter(|&v| owner[v].is_some())
        .map(|v| w.node[v])
        .sum();
    let edges: u128 = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(_, &(u, v))| owner[u].is_some() && owner[u] == owner[v])
        .map(|(e, _)| w.edge[e])
        .sum();
    nodes + edges
}

/// Clusters `g` with separation `h` and expected density at least `1 − η`.
pub fn cluster(g: &WeightedGraph, weights: &ElementWeights, h: usize, eta: f64, seed: u64) -> Result<Clustering> {
    if h == 0 {
        return input("separation h must be at least 1");
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return input(format!("density loss {eta} outside (0, 1]"));
    }
    if weights.node.len() != g.n() || weights.edge.len() != g.m() {
        return input("weights do not match the graph");
    }
    let n = g.n();
    let beta = eta / (4.0 * (h.saturating_sub(1).max(1)) as f64);
    let cap = 8.0 * ((n + 1) as f64).ln() / beta;
    let exp = Exp::new(beta).map_err(|e| Error::Input(format!("bad delay rate: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delays: Vec<f64> = (0..n).map(|_| exp.sample(&mut rng).min(cap)).collect();

    let labels = top_two(g, &delays);
    let margin = (h - 1) as f64;
    let mut center_of = vec![None; n];
    for (u, ls) in labels.iter().enumerate() {
        let kept = match ls.as_slice() {
            [best] => Some(best.source),
            [best, second] if second.key - best.key > margin => Some(best.source),
            _ => None,
        };
        center_of[u] = kept;
    }

    let mut centers: Vec<usize> = center_of.iter().flatten().copied().collect();
    centers.sort_unstable();
    centers.dedup();
    let mut owner = vec![None; n];
    let mut clusters = Vec::with_capacity(centers.len());
    let mut trees = Vec::with_capacity(centers.len());
    for (i, &c) in centers.iter().enumerate() {
        let members: Vec<bool> = center_of.iter().map(|&x| x == Some(c)).collect();
        let tree = bfs_inside(g, c, &members);
        let nodes: Vec<usize> = (0..n).filter(|&v| members[v]).collect();
        if tree.size() != nodes.len() {
            return invariant(format!("cluster around {c} is not connected"));
        }
        for &v in &nodes {
            owner[v] = Some(i);
        }
        clusters.push(nodes);
        trees.push(tree);
    }
    let inside = inside_weight(g, &owner, weights);
    let total = weights.total();
    let max_delay = delays.iter().copied().fold(0.0, f64::max);
    let tree_diameter = trees.iter().map(RootedTree::diameter).max().unwrap_or(0);
    Ok(Clustering {
        clusters,
        trees,
        owner,
        h,
        density: if total == 0 {
            1.0
        } else {
            inside as f64 / total as f64
        },
        inside_weight: inside,
        total_weight: total,
        congestion: 1,
        tree_diameter,
        rounds: max_delay.ceil() as u64 + h as u64,
    })
}

impl Clustering {
    /// Cluster `i` together with all its neighbors, sorted.
    pub fn extended(&self, g: &WeightedGraph, i: usize) -> Vec<usize> {
        let mut nodes = self.clusters[i].clone();
        for &v in &self.clusters[i] {
            nodes.extend(g.neighbors(v).iter().map(|&(u, _)| u));
        }
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    /// Checks that clusters are disjoint and agree with `owner`.
    pub fn check_disjoint(&self) -> Result<()> {
        let mut seen = vec![None; self.owner.len()];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in c {
                if v >= seen.len() || seen[v].replace(i).is_some() {
                    return invariant(format!("node {v} is in two clusters"));
                }
                if self.owner[v] != Some(i) {
                    return invariant(format!("owner of node {v} disagrees with cluster {i}"));
                }
            }
        }
        if seen != self.owner {
            return invariant("owner map lists nodes outside every cluster");
        }
        Ok(())
    }

    /// Checks that nodes of distinct clusters are at least `h` hops apart.
    pub fn check_separation(&self, g: &WeightedGraph) -> Result<()> {
        let limit = self.h - 1;
        let mut dist = vec![usize::MAX; g.n()];
        let mut touched = Vec::new();
        for (i, c) in self.clusters.iter().enumerate() {
            for &s in c {
                dist[s] = 0;
                touched.push(s);
                let mut queue = VecDeque::from([s]);
                while let Some(v) = queue.pop_front() {
                    if let Some(j) = self.owner[v] {
                        if j != i {
                            return invariant(format!(
                                "nodes {s} and {v} of clusters {i} and {j} are {} hops apart",
                                dist[v]
                            ));
                        }
                    }
                    if dist[v] == limit {
                        continue;
                    }
                    for &(u, _) in g.neighbors(v) {
                        if dist[u] == usize::MAX {
                            dist[u] = dist[v] + 1;
                            touched.push(u);
                            queue.push_back(u);
                        }
                    }
                }
                for v in touched.drain(..) {
                    dist[v] = usize::MAX;
                }
            }
        }
        Ok(())
    }

    /// Checks that each tree spans its cluster inside `g`, has diameter at
    /// most `tree_diameter`, and that no edge lies in more than `congestion` trees.
    pub fn check_routability(&self, g: &WeightedGraph) -> Result<()> {
        if self.trees.len() != self.clusters.len() {
            return invariant("one tree per cluster required");
        }
        let mut load = vec![0usize; g.m()];
        for (i, (tree, c)) in self.trees.iter().zip(&self.clusters).enumerate() {
            if !tree.is_subgraph_of(g) {
                return invariant(format!("tree {i} uses a non-edge"));
            }
            if c.iter().any(|&v| !tree.contains(v)) {
                return invariant(format!("tree {i} misses a node of its cluster"));
            }
            if tree.diameter() > self.tree_diameter {
                return invariant(format!("tree {i} exceeds the diameter bound"));
            }
            for (a, b) in tree.edges() {
                if let Some(e) = g.edge_id(a, b) {
                    load[e] += 1;
                }
            }
        }
        if load.iter().any(|&l| l > self.congestion) {
            return invariant("an edge exceeds the congestion bound");
        }
        Ok(())
    }

    /// Recomputes the density for the given weights.
    pub fn measure_density(&self, g: &WeightedGraph, weights: &ElementWeights) -> f64 {
        let total = weights.total();
        if total == 0 {
            return 1.0;
        }
        inside_weight(g, &self.owner, weights) as f64 / total as f64
    }

    /// Runs every structural check.
    pub fn audit(&self, g: &WeightedGraph) -> Result<()> {
        self.check_disjoint()?;
        self.check_separation(g)?;
        self.check_routability(g)
    }
}

/// What a leader returns for its cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderOutput<T> {
    pub value: T,
    /// Rounds the replaced distributed subroutine is cited to need.
    pub cited_rounds: u64,
    /// Size of the answer scattered back to the cluster.
    pub result_bits: usize,
}

/// Per-cluster leader outputs with combined accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSolution<T> {
    pub outputs: Vec<T>,
    pub stats: RoundStats,
}

/// Bits needed to describe a region's induced subgraph.
fn gather_bits(g: &WeightedGraph, sub: &Subgraph) -> usize {
    let id = log2_ceil(g.n());
    let weight = bit_len(u128::from(g.max_weight()));
    let node = id + if g.mode().has_node_weights() { weight } else { 0 };
    let edge = 2 * id + if g.mode().has_edge_weights() { weight } else { 0 };
    sub.nodes.len() * node + sub.edges.len() * edge
}

/// Gathers each region's induced subgraph at its cluster center, solves it
/// there, and scatters the answer. Regions run concurrently; each direction
/// costs `c·(depth + ⌈bits/B⌉)` rounds, where depth counts the extra hop to
/// region nodes outside the cluster.
pub fn cluster_leader_solve<T, F>(
    g: &WeightedGraph,
    clustering: &Clustering,
    regions: &[Vec<usize>],
    capacity: usize,
    config: &SimConfig,
    mut solver: F,
) -> Result<ClusterSolution<T>>
where
    F: FnMut(usize, &Subgraph) -> Result<LeaderOutput<T>>,
{
    if regions.len() != clustering.clusters.len() {
        return input("one region per cluster required");
    }
    let budget = config.bit_budget.max(1);
    let c = clustering.congestion.max(1) as u64;
    let mut stats = config.empty_stats();
    let mut outputs = Vec::with_capacity(regions.len());
    for (i, region) in regions.iter().enumerate() {
        let tree = &clustering.trees[i];
        let sub = g.induced_subgraph(region)?;
        if sub.edges.len() > capacity {
            return Err(Error::Capacity {
                cluster: i,
                size: sub.edges.len(),
                capacity,
            });
        }
        let outside = region.iter().any(|&v| !tree.contains(v));
        let depth = (tree.height() + usize::from(outside)) as u64;
        let out = solver(i, &sub)?;
        let leg = |bits: usize| -> (u64, u64) {
            if depth == 0 {
                (0, 0)
            } else {
                let chunks = bits.div_ceil(budget) as u64;
                (c * (depth + chunks), chunks * (region.len() as u64 - 1))
            }
        };
        let (up, up_msgs) = leg(gather_bits(g, &sub));
        let (down, down_msgs) = leg(out.result_bits);
        let moved = up_msgs + down_msgs > 0;
        stats = stats.alongside(RoundStats {
            rounds: up + down,
            rounds_cited: up + c * out.cited_rounds + down,
            max_bits_per_message: if moved { budget } else { 0 },
            messages_sent: up_msgs + down_msgs,
            bit_budget: config.bit_budget,
        });
        outputs.push(out.value);
    }
    Ok(ClusterSolution { outputs, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GenParams, GraphKind};

    #[test]
    fn single_node_is_one_dense_cluster() {
        let g = WeightedGraph::unit(1, vec![]).unwrap();
        let c = cluster(&g, &ElementWeights::unit(&g), 3, 0.25, 0).unwrap();
        assert_eq!(c.clusters, vec![vec![0]]);
        assert_eq!(c.density, 1.0);
        c.audit(&g).unwrap();
    }

    #[test]
    fn single_edge_is_separated() {
        let g = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        for seed in 0..50 {
            let c = cluster(&g, &ElementWeights::unit(&g), 3, 0.5, seed).unwrap();
            c.audit(&g).unwrap();
            assert!(c.clusters.len() <= 1 || c.inside_weight < 3);
        }
    }

    #[test]
    fn clusters_pass_audits_on_random_graphs() {
        let g = generate(&GraphKind::RandomGeneral { n: 120, p: 0.04 }, &GenParams::default(), 5).unwrap();
        for seed in 0..10 {
            let c = cluster(&g, &ElementWeights::unit(&g), 3, 0.25, seed).unwrap();
            c.audit(&g).unwrap();
            assert!((c.measure_density(&g, &ElementWeights::unit(&g)) - c.density).abs() < 1e-12);
        }
    }

    #[test]
    fn leader_solve_runs_in_parallel() {
        let g = WeightedGraph::unit(4, vec![(0, 1), (2, 3)]).unwrap();
        let tree = |root: usize, child: usize| RootedTree::from_parents(4, root, &[(child, root)]).unwrap();
        let clustering = Clustering {
            clusters: vec![vec![0, 1], vec![2, 3]],
            trees: vec![tree(0, 1), tree(2, 3)],
            owner: vec![Some(0), Some(0), Some(1), Some(1)],
            h: 1,
            density: 1.0,
            inside_weight: 6,
            total_weight: 6,
            congestion: 1,
            tree_diameter: 1,
            rounds: 0,
        };
        clustering.audit(&g).unwrap();
        let config = SimConfig::for_graph(&g);
        let both = cluster_leader_solve(&g, &clustering, &clustering.clusters, 10, &config, |i, sub| {
            Ok(LeaderOutput {
                value: (i, sub.graph.m()),
                cited_rounds: 1,
                result_bits: 2,
            })
        })
        .unwrap();
        assert_eq!(both.outputs, vec![(0, 1), (1, 1)]);
        let one = cluster_leader_solve(
            &g,
            &Clustering {
                clusters: vec![vec![0, 1]],
                trees: vec![clustering.trees[0].clone()],
                ..clustering.clone()
            },
            &[vec![0, 1]],
            10,
            &config,
            |_, _| {
                Ok(LeaderOutput {
                    value: (),
                    cited_rounds: 1,
                    result_bits: 2,
                })
            },
        )
        .unwrap();
        assert_eq!(both.stats.rounds, one.stats.rounds);
        assert!(both.stats.within_budget());
    }

    #[test]
    fn single_node_leader_solve_is_cheap() {
        let g = WeightedGraph::unit(1, vec![]).unwrap();
        let c = cluster(&g, &ElementWeights::unit(&g), 3, 0.25, 1).unwrap();
        let out = cluster_leader_solve(&g, &c, &c.clusters, 10, &SimConfig::for_graph(&g), |_, _| {
            Ok(LeaderOutput {
                value: 42,
                cited_rounds: 0,
                result_bits: 1,
            })
        })
        .unwrap();
        assert_eq!(out.outputs, vec![42]);
        assert!(out.stats.rounds <= 2);
    }

    #[test]
    fn gather_capacity_is_enforced() {
        let g = WeightedGraph::unit(3, vec![(0, 1), (1, 2)]).unwrap();
        let c = cluster(&g, &ElementWeights::unit(&g), 1, 1.0, 0).unwrap();
        let regions: Vec<Vec<usize>> = (0..c.clusters.len()).map(|i| c.extended(&g, i)).collect();
        let err = cluster_leader_solve(&g, &c, &regions, 0, &SimConfig::for_graph(&g), |_, _| {
            Ok(LeaderOutput {
                value: (),
                cited_rounds: 0,
                result_bits: 1,
            })
        })
        .unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }
}
