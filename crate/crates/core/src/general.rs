//! Weighted vertex cover on general graphs through the bipartite double
//! cover: a half-integral cover, then an independent set removed from its
//! half-valued nodes.

use std::collections::VecDeque;

use crate::bipartite::{mwvc_bipartite_pipeline, BipartiteReport, CoverConfig};
use crate::error::{input, invariant, Result};
use crate::fractional::{product_le, Rational};
use crate::graph::{double_cover, CoverSolution, HalfIntegralCover, WeightedGraph};
use crate::sim::{run_protocol, NodeContext, NodeProgram, RoundStats, SimConfig};

/// `x_v = |{(v, 0), (v, 1)} ∩ S| / 2` for a cover `S` of the double cover.
pub fn half_integral_from_double_cover(
    g: &WeightedGraph,
    cover: &CoverSolution,
) -> Result<HalfIntegralCover> {
    let doubled = double_cover(g)?;
    if let Some(e) = cover.uncovered_edge(&doubled) {
        return invariant(format!("double cover edge {e} is uncovered"));
    }
    let mut halves = vec![0u8; g.n()];
    for &v in cover.nodes() {
        halves[v / 2] += 1;
    }
    HalfIntegralCover::new(g, halves)
}

/// `S_1 ∪ (S_{1/2} \ I)` for an independent set `I ⊆ S_{1/2}`.
pub fn round_half_integral(
    g: &WeightedGraph,
    cover: &HalfIntegralCover,
    independent: &[usize],
) -> Result<CoverSolution> {
    let mut drop = vec![false; g.n()];
    for &v in independent {
        g.check_node(v)?;
        if cover.halves(v) != 1 {
            return invariant(format!("node {v} is not half-valued"));
        }
        drop[v] = true;
    }
    if let Some(&(u, v)) = g.edges().iter().find(|&&(u, v)| drop[u] && drop[v]) {
        return invariant(format!("nodes {u} and {v} are adjacent in the independent set"));
    }
    let nodes = (0..g.n())
        .filter(|&v| cover.halves(v) == 2 || (cover.halves(v) == 1 && !drop[v]))
        .collect();
    let s = CoverSolution::new(g, nodes)?;
    if let Some(e) = s.uncovered_edge(g) {
        return invariant(format!("rounded cover misses edge {e}"));
    }
    Ok(s)
}

/// Heaviest class of a proper coloring of `G[nodes]`; ties go to the
/// smaller color. `colors` is aligned with `nodes`.
pub fn heaviest_color_class(g: &WeightedGraph, nodes: &[usize], colors: &[usize]) -> Result<Vec<usize>> {
    if nodes.len() != colors.len() {
        return input("one color per node required");
    }
    let mut color_of = vec![None; g.n()];
    for (&v, &c) in nodes.iter().zip(colors) {
        g.check_node(v)?;
        color_of[v] = Some(c);
    }
    if let Some(&(u, v)) = g
        .edges()
        .iter()
        .find(|&&(u, v)| color_of[u].is_some() && color_of[u] == color_of[v])
    {
        return invariant(format!("nodes {u} and {v} share a color"));
    }
    let classes = colors.iter().max().map_or(0, |&c| c + 1);
    let mut weight = vec![0u128; classes];
    for (&v, &c) in nodes.iter().zip(colors) {
        weight[c] += u128::from(g.node_weight(v));
    }
    let Some(best) = (0..classes).max_by_key(|&c| (weight[c], std::cmp::Reverse(c))) else {
        return Ok(Vec::new());
    };
    let mut class: Vec<usize> = nodes
        .iter()
        .zip(colors)
        .filter(|&(_, &c)| c == best)
        .map(|(&v, _)| v)
        .collect();
    class.sort_unstable();
    Ok(class)
}

/// How the independent set inside `S_{1/2}` is found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Provider {
    /// Greedy coloring by id order, heaviest class per component.
    GreedyColoring,
    /// Heavier side of a 2-coloring per component; bipartite inputs only.
    TwoColoring,
    /// 2-coloring on bipartite components, greedy coloring elsewhere.
    #[default]
    Auto,
}

/// Independent set returned by a [`Provider`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentSet {
    pub nodes: Vec<usize>,
    /// Most colors used in one component.
    pub colors: usize,
    pub stats: RoundStats,
}

struct GreedyColorNode {
    id: usize,
    neighbors: Vec<usize>,
    neighbor_color: Vec<Option<u64>>,
    color: Option<u64>,
}

impl NodeProgram for GreedyColorNode {
    type Msg = u64;
    type Output = u64;

    fn send(&mut self, _round: u64) -> Vec<(usize, u64)> {
        if self.color.is_some() {
            return Vec::new();
        }
        let ready = self
            .neighbors
            .iter()
            .zip(&self.neighbor_color)
            .all(|(&u, c)| u > self.id || c.is_some());
        if !ready {
            return Vec::new();
        }
        let used: Vec<u64> = self.neighbor_color.iter().flatten().copied().collect();
        let c = (0..).find(|c| !used.contains(c)).unwrap_or(0);
        self.color = Some(c);
        self.neighbors.iter().map(|&u| (u, c)).collect()
    }

    fn receive(&mut self, _round: u64, inbox: Vec<(usize, u64)>) {
        for (from, c) in inbox {
            if let Ok(i) = self.neighbors.binary_search(&from) {
                self.neighbor_color[i] = Some(c);
            }
        }
    }

    fn halted(&self) -> bool {
        self.color.is_some()
    }

    fn output(self) -> u64 {
        self.color.unwrap_or(0)
    }
}

/// Greedy coloring in id order as a node program: a node picks the
/// smallest color unused by its neighbors once all smaller neighbors chose.
pub fn greedy_coloring(g: &WeightedGraph, config: &SimConfig) -> Result<(Vec<usize>, RoundStats)> {
    let (colors, stats) = run_protocol(g, config, |ctx: &NodeContext| GreedyColorNode {
        id: ctx.id,
        neighbors: ctx.neighbors.iter().map(|&(u, _)| u).collect(),
        neighbor_color: vec![None; ctx.neighbors.len()],
        color: None,
    })?;
    Ok((colors.into_iter().map(|c| c as usize).collect(), stats))
}

/// Connected components as sorted node lists, ordered by smallest node.
fn components(g: &WeightedGraph) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(u, _) in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Rounds to agree on one class inside a component: convergecast and
/// broadcast over a BFS tree from its smallest node.
fn selection_rounds(g: &WeightedGraph, comp: &[usize]) -> u64 {
    let dist = g.bfs_distances(comp[0]);
    let height = comp.iter().map(|&v| dist[v]).max().unwrap_or(0) as u64;
    2 * height + 1
}

/// Runs `provider` on `G[nodes]` and returns an independent set of it.
pub fn independent_set(
    g: &WeightedGraph,
    nodes: &[usize],
    provider: Provider,
    config: &SimConfig,
) -> Result<IndependentSet> {
    let sub = g.induced_subgraph(nodes)?;
    let h = &sub.graph;
    let (greedy, color_stats) = match provider {
        Provider::TwoColoring => (None, RoundStats::accounted(0, config)),
        _ => {
            let (c, s) = greedy_coloring(h, config)?;
            (Some(c), s)
        }
    };
    let mut chosen = Vec::new();
    let mut colors = 0;
    let mut select = 0u64;
    let mut two_color_rounds = 0u64;
    for comp in components(h) {
        let two = match provider {
            Provider::GreedyColoring => None,
            Provider::TwoColoring | Provider::Auto => {
                let part = h.induced_subgraph(&comp)?;
                let coloring = part.graph.two_coloring();
                if coloring.is_none() && provider == Provider::TwoColoring {
                    return input("two-coloring provider on a non-bipartite component");
                }
                coloring.map(|c| c.into_iter().map(usize::from).collect::<Vec<_>>())
            }
        };
        let comp_colors: Vec<usize> = match (&two, &greedy) {
            (Some(c), _) => {
                two_color_rounds = two_color_rounds.max(selection_rounds(h, &comp));
                c.clone()
            }
            (None, Some(all)) => comp.iter().map(|&v| all[v]).collect(),
            (None, None) => return invariant("no coloring available"),
        };
        colors = colors.max(comp_colors.iter().max().map_or(0, |&c| c + 1));
        select = select.max(selection_rounds(h, &comp));
        chosen.extend(heaviest_color_class(h, &comp, &comp_colors)?);
    }
    let mut nodes_out: Vec<usize> = chosen.into_iter().map(|v| sub.nodes[v]).collect();
    nodes_out.sort_unstable();
    let stats = color_stats
        .then(RoundStats::accounted(two_color_rounds, config))
        .then(RoundStats::accounted(select, config));
    Ok(IndependentSet {
        nodes: nodes_out,
        colors,
        stats,
    })
}

/// Output of [`mwvc_general_pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralReport {
    pub cover: CoverSolution,
    pub half_integral: HalfIntegralCover,
    pub independent: IndependentSet,
    /// `w(I) / w(S_{1/2})`, 1 when `S_{1/2}` is empty.
    pub lambda: Rational,
    pub stats: RoundStats,
    /// The bipartite run on the double cover.
    pub double_cover: BipartiteReport,
}

/// Cover with `w(S) ≤ max(1, 2 − 2λ)·(1 + ε)·w(S*)`.
///
/// Solves the double cover with the bipartite pipeline, reads off the
/// half-integral cover, and drops an independent set of the half-valued
/// nodes. Checks `w(S) ≤ max(1, 2 − 2λ)·w(x)` where `w(x)` is the
/// half-integral weight.
pub fn mwvc_general_pipeline(
    g: &WeightedGraph,
    config: &CoverConfig,
    provider: Provider,
) -> Result<GeneralReport> {
    g.require_node_weights("vertex cover")?;
    let doubled = double_cover(g)?;
    let report = mwvc_bipartite_pipeline(&doubled, config)?;
    let half = half_integral_from_double_cover(g, &report.cover)?;
    let halves = half.halves_set();
    let independent = independent_set(g, &halves, provider, &config.sim)?;
    let cover = round_half_integral(g, &half, &independent.nodes)?;

    let half_weight = i128::from(g.weight_of(&halves));
    let dropped = i128::from(g.weight_of(&independent.nodes));
    let lambda = if half_weight == 0 {
        Rational::from_integer(1)
    } else {
        Rational::new(dropped, half_weight)
    };
    // w(S) ≤ max(1, 2 − 2λ)·w(x), with w(x) = doubled / 2.
    let w = i128::from(cover.weight(g));
    let doubled_weight = i128::from(half.doubled_weight(g));
    let factor = (Rational::from_integer(2) - lambda * 2).max(Rational::from_integer(1));
    if !product_le(2 * w, *factor.denom(), *factor.numer(), doubled_weight) {
        return invariant("rounded cover exceeds max(1, 2 − 2λ) times the half-integral weight");
    }
    // Each node simulates its two copies; one extra round sends the
    // copies' membership to the node.
    let stats = report
        .stats
        .then(independent.stats)
        .then(RoundStats {
            rounds: 1,
            rounds_cited: 1,
            max_bits_per_message: usize::from(g.m() > 0),
            messages_sent: 2 * g.m() as u64,
            bit_budget: config.sim.bit_budget,
        });
    Ok(GeneralReport {
        cover,
        half_integral: half,
        independent,
        lambda,
        stats,
        double_cover: report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_mwvc;

    fn triangle() -> WeightedGraph {
        WeightedGraph::unit(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn half_integral_examples() {
        let edge = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        let both = CoverSolution::new(&double_cover(&edge).unwrap(), vec![0, 1]).unwrap();
        let h = half_integral_from_double_cover(&edge, &both).unwrap();
        assert_eq!((h.halves(0), h.halves(1)), (2, 0));

        let g = triangle();
        let g2 = double_cover(&g).unwrap();
        let one_copy = CoverSolution::new(&g2, vec![0, 2, 4]).unwrap();
        assert_eq!(exact_mwvc(&g2).unwrap().weight(&g2), 3);
        let h = half_integral_from_double_cover(&g, &one_copy).unwrap();
        assert_eq!(h.halves_set(), vec![0, 1, 2]);
        assert_eq!(h.doubled_weight(&g), 3);

        let all = CoverSolution::new(&g2, (0..6).collect()).unwrap();
        assert_eq!(half_integral_from_double_cover(&g, &all).unwrap().ones(), vec![0, 1, 2]);
        let bad = CoverSolution::new(&g2, vec![0]).unwrap();
        assert!(half_integral_from_double_cover(&g, &bad).is_err());
    }

    #[test]
    fn rounding_examples() {
        let g = triangle();
        let h = HalfIntegralCover::new(&g, vec![1, 1, 1]).unwrap();
        let s = round_half_integral(&g, &h, &[1]).unwrap();
        assert_eq!(s.nodes(), &[0, 2]);
        assert_eq!(round_half_integral(&g, &h, &[]).unwrap().nodes(), &[0, 1, 2]);
        assert!(round_half_integral(&g, &h, &[0, 1]).is_err());
        let ones = HalfIntegralCover::new(&g, vec![2, 2, 0]).unwrap();
        assert_eq!(round_half_integral(&g, &ones, &[]).unwrap().nodes(), &[0, 1]);
    }

    #[test]
    fn heaviest_class_examples() {
        let p3 = WeightedGraph::unit(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(heaviest_color_class(&p3, &[0, 1, 2], &[0, 1, 0]).unwrap(), vec![0, 2]);
        assert_eq!(heaviest_color_class(&p3, &[1], &[0]).unwrap(), vec![1]);
        let free = WeightedGraph::node_weighted(3, vec![], vec![5, 1, 1]).unwrap();
        assert_eq!(heaviest_color_class(&free, &[0, 1, 2], &[0, 1, 2]).unwrap(), vec![0]);
        assert!(heaviest_color_class(&p3, &[0, 1], &[0, 0]).is_err());
    }

    #[test]
    fn greedy_coloring_is_proper() {
        let g = triangle();
        let (c, stats) = greedy_coloring(&g, &SimConfig::for_graph(&g)).unwrap();
        assert_eq!(c, vec![0, 1, 2]);
        assert_eq!(stats.rounds, 3);
    }

    #[test]
    fn pipeline_on_small_graphs() {
        let g = triangle();
        let r = mwvc_general_pipeline(&g, &CoverConfig::new(&g, 0.25, 3), Provider::GreedyColoring).unwrap();
        assert!(r.cover.is_cover(&g));
        assert!(r.cover.weight(&g) as f64 <= (4.0 / 3.0) * 1.25 * 2.0);

        let c6 = WeightedGraph::unit(6, (0..6).map(|v| (v, (v + 1) % 6)).collect()).unwrap();
        let r = mwvc_general_pipeline(&c6, &CoverConfig::new(&c6, 0.25, 3), Provider::TwoColoring).unwrap();
        assert!(r.cover.weight(&c6) as f64 <= 1.25 * 3.0);
    }
}
