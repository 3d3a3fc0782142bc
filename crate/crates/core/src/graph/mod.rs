//! Weighted undirected graphs and the integral solution types built on them.
//!
//! Node ids are dense (`0..n`). Edge ids are dense too and follow insertion
//! order; every edge is stored with its smaller endpoint first.

mod generate;
mod io;
mod transform;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{input, invariant, Result};

pub use generate::{generate, GenParams, GraphKind};
pub use io::{format_graph, parse_graph, read_graph, write_graph};
pub use transform::{double_cover, subdivide_edges, SubdividedEdge, Subdivision};

/// Which weight vectors a graph carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightMode {
    Node,
    Edge,
    Both,
}

impl WeightMode {
    pub fn has_node_weights(self) -> bool {
        matches!(self, WeightMode::Node | WeightMode::Both)
    }

    pub fn has_edge_weights(self) -> bool {
        matches!(self, WeightMode::Edge | WeightMode::Both)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::Node => "node",
            WeightMode::Edge => "edge",
            WeightMode::Both => "both",
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for WeightMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node" => Ok(WeightMode::Node),
            "edge" => Ok(WeightMode::Edge),
            "both" => Ok(WeightMode::Both),
            other => input(format!("unknown weight mode `{other}`")),
        }
    }
}

/// Largest admissible weight bound for a graph on `n` nodes.
pub fn weight_cap(n: usize) -> u64 {
    (n.max(2) as u64).saturating_pow(10)
}

/// An undirected graph with integer node and/or edge weights.
///
/// Immutable after construction. A missing weight vector reads as unit
/// weights through [`WeightedGraph::node_weight`] and
/// [`WeightedGraph::edge_weight`].
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
    index: HashMap<(usize, usize), usize>,
    node_weights: Option<Vec<u64>>,
    edge_weights: Option<Vec<u64>>,
    max_weight: u64,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.edges == other.edges
            && self.node_weights == other.node_weights
            && self.edge_weights == other.edge_weights
            && self.max_weight == other.max_weight
    }
}

impl Eq for WeightedGraph {}

impl WeightedGraph {
    /// Builds a graph, validating ids, simple-graph structure and weights.
    ///
    /// The weight bound `W` defaults to the largest weight present.
    pub fn new(
        n: usize,
        edges: Vec<(usize, usize)>,
        node_weights: Option<Vec<u64>>,
        edge_weights: Option<Vec<u64>>,
    ) -> Result<Self> {
        let w = node_weights
            .iter()
            .flatten()
            .chain(edge_weights.iter().flatten())
            .copied()
            .max()
            .unwrap_or(1);
        Self::with_bound(n, edges, node_weights, edge_weights, w)
    }

    /// Like [`WeightedGraph::new`] with an explicit weight bound `W`.
    pub fn with_bound(
        n: usize,
        edges: Vec<(usize, usize)>,
        node_weights: Option<Vec<u64>>,
        edge_weights: Option<Vec<u64>>,
        max_weight: u64,
    ) -> Result<Self> {
        Self::build(n, edges, node_weights, edge_weights, max_weight, true)
    }

    pub(crate) fn build(
        n: usize,
        edges: Vec<(usize, usize)>,
        node_weights: Option<Vec<u64>>,
        edge_weights: Option<Vec<u64>>,
        max_weight: u64,
        check_cap: bool,
    ) -> Result<Self> {
        if node_weights.is_none() && edge_weights.is_none() {
            return input("graph needs node weights, edge weights or both");
        }
        if max_weight == 0 {
            return input("weight bound must be at least 1");
        }
        if check_cap && max_weight > weight_cap(n) {
            return input(format!(
                "weight bound {max_weight} exceeds n^10 = {}",
                weight_cap(n)
            ));
        }
        if let Some(ws) = &node_weights {
            if ws.len() != n {
                return input(format!("expected {n} node weights, got {}", ws.len()));
            }
            if let Some(v) = ws.iter().position(|&w| w == 0 || w > max_weight) {
                return input(format!(
                    "node {v} has weight {} outside [1, {max_weight}]",
                    ws[v]
                ));
            }
        }
        if let Some(ws) = &edge_weights {
            if ws.len() != edges.len() {
                return input(format!(
                    "expected {} edge weights, got {}",
                    edges.len(),
                    ws.len()
                ));
            }
            if let Some(e) = ws.iter().position(|&w| w == 0 || w > max_weight) {
                return input(format!(
                    "edge {e} has weight {} outside [1, {max_weight}]",
                    ws[e]
                ));
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut index = HashMap::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for (id, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return input(format!("edge ({a}, {b}) references a node >= {n}"));
            }
            if a == b {
                return input(format!("self-loop at node {a}"));
            }
            let key = (a.min(b), a.max(b));
            if index.insert(key, id).is_some() {
                return input(format!("parallel edge ({}, {})", key.0, key.1));
            }
            adj[key.0].push((key.1, id));
            adj[key.1].push((key.0, id));
            normalized.push(key);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(WeightedGraph {
            n,
            edges: normalized,
            adj,
            index,
            node_weights,
            edge_weights,
            max_weight,
        })
    }

    /// Node-weighted graph.
    pub fn node_weighted(n: usize, edges: Vec<(usize, usize)>, weights: Vec<u64>) -> Result<Self> {
        Self::new(n, edges, Some(weights), None)
    }

    /// Edge-weighted graph from `(u, v, w)` triples.
    pub fn edge_weighted(n: usize, edges: Vec<(usize, usize, u64)>) -> Result<Self> {
        let (pairs, weights) = edges.into_iter().map(|(u, v, w)| ((u, v), w)).unzip();
        Self::new(n, pairs, None, Some(weights))
    }

    /// Graph with unit node weights.
    pub fn unit(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(n, edges, Some(vec![1; n]), None)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Declared weight bound `W`.
    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    pub fn mode(&self) -> WeightMode {
        match (self.node_weights.is_some(), self.edge_weights.is_some()) {
            (true, true) => WeightMode::Both,
            (true, false) => WeightMode::Node,
            _ => WeightMode::Edge,
        }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Id of the edge `{u, v}`, if present.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    /// `(neighbor, edge id)` pairs sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn node_weights(&self) -> Option<&[u64]> {
        self.node_weights.as_deref()
    }

    pub fn edge_weights(&self) -> Option<&[u64]> {
        self.edge_weights.as_deref()
    }

    pub fn node_weight(&self, v: usize) -> u64 {
        self.node_weights.as_ref().map_or(1, |w| w[v])
    }

    pub fn edge_weight(&self, e: usize) -> u64 {
        self.edge_weights.as_ref().map_or(1, |w| w[e])
    }

    pub(crate) fn require_node_weights(&self, what: &str) -> Result<&[u64]> {
        match &self.node_weights {
            Some(w) => Ok(w),
            None => input(format!("{what} needs node weights")),
        }
    }

    pub(crate) fn require_edge_weights(&self, what: &str) -> Result<&[u64]> {
        match &self.edge_weights {
            Some(w) => Ok(w),
            None => input(format!("{what} needs edge weights")),
        }
    }

    pub(crate) fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return input(format!("node id {v} out of range (n = {})", self.n));
        }
        Ok(())
    }

    /// Total node weight of `nodes`.
    pub fn weight_of(&self, nodes: &[usize]) -> u64 {
        nodes.iter().map(|&v| self.node_weight(v)).sum()
    }

    /// BFS 2-coloring, `false` for the side of each component's smallest node.
    /// `None` if some component has an odd cycle.
    pub fn two_coloring(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for &(v, _) in &self.adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(Option::unwrap).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.two_coloring().is_some()
    }

    /// Hop distances from `source`; `usize::MAX` marks unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Subgraph induced by `nodes` with local ids in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Subgraph> {
        let mut local = HashMap::with_capacity(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            self.check_node(v)?;
            if local.insert(v, i).is_some() {
                return input(format!("node {v} listed twice"));
            }
        }
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if let (Some(&a), Some(&b)) = (local.get(&u), local.get(&v)) {
                edges.push((a, b));
                edge_map.push(e);
            }
        }
        let node_weights = self
            .node_weights
            .as_ref()
            .map(|w| nodes.iter().map(|&v| w[v]).collect());
        let edge_weights = self
            .edge_weights
            .as_ref()
            .map(|w| edge_map.iter().map(|&e| w[e]).collect());
        // Subgraphs inherit the parent's bound; the n^10 cap applies to the parent.
        let graph = WeightedGraph::build(
            nodes.len(),
            edges,
            node_weights,
            edge_weights,
            self.max_weight,
            false,
        )?;
        Ok(Subgraph {
            graph,
            nodes: nodes.to_vec(),
            edges: edge_map,
        })
    }

    /// Subgraph on all nodes keeping only the listed edges.
    pub fn edge_subgraph(&self, edge_ids: &[usize]) -> Result<Subgraph> {
        let mut edges = Vec::with_capacity(edge_ids.len());
        for &e in edge_ids {
            if e >= self.m() {
                return input(format!("edge id {e} out of range"));
            }
            edges.push(self.edges[e]);
        }
        let edge_weights = self
            .edge_weights
            .as_ref()
            .map(|w| edge_ids.iter().map(|&e| w[e]).collect());
        let graph = WeightedGraph::build(
            self.n,
            edges,
            self.node_weights.clone(),
            edge_weights,
            self.max_weight,
            false,
        )?;
        Ok(Subgraph {
            graph,
            nodes: (0..self.n).collect(),
            edges: edge_ids.to_vec(),
        })
    }
}

/// A subgraph with maps from local ids back to the parent graph.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: WeightedGraph,
    /// Parent id of each local node.
    pub nodes: Vec<usize>,
    /// Parent id of each local edge.
    pub edges: Vec<usize>,
}

/// True iff every edge of `g` has an endpoint in `s`.
pub fn is_cover(g: &WeightedGraph, s: &[usize]) -> Result<bool> {
    let mut member = vec![false; g.n()];
    for &v in s {
        g.check_node(v)?;
        member[v] = true;
    }
    Ok(g.edges().iter().all(|&(u, v)| member[u] || member[v]))
}

/// A set of nodes offered as a vertex cover.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverSolution {
    nodes: Vec<usize>,
}

impl CoverSolution {
    /// Sorts and deduplicates; rejects ids outside `g`.
    pub fn new(g: &WeightedGraph, mut nodes: Vec<usize>) -> Result<Self> {
        for &v in &nodes {
            g.check_node(v)?;
        }
        nodes.sort_unstable();
        nodes.dedup();
        Ok(CoverSolution { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn weight(&self, g: &WeightedGraph) -> u64 {
        g.weight_of(&self.nodes)
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.nodes {
            mask[v] = true;
        }
        mask
    }

    /// First edge with no endpoint in the set.
    pub fn uncovered_edge(&self, g: &WeightedGraph) -> Option<usize> {
        let mask = self.mask(g.n());
        g.edges().iter().position(|&(u, v)| !mask[u] && !mask[v])
    }

    pub fn is_cover(&self, g: &WeightedGraph) -> bool {
        self.uncovered_edge(g).is_none()
    }
}

/// A set of pairwise disjoint edges, stored as sorted edge ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    edges: Vec<usize>,
}

impl Matching {
    /// Validates ids and disjointness.
    pub fn new(g: &WeightedGraph, mut edges: Vec<usize>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        let mut owner = vec![usize::MAX; g.n()];
        for &e in &edges {
            if e >= g.m() {
                return input(format!("edge id {e} out of range (m = {})", g.m()));
            }
            let (u, v) = g.endpoints(e);
            for x in [u, v] {
                if owner[x] != usize::MAX {
                    let (a, b) = g.endpoints(owner[x]);
                    return invariant(format!(
                        "node {x} is shared by matching edges ({a}, {b}) and ({u}, {v})"
                    ));
                }
                owner[x] = e;
            }
        }
        Ok(Matching { edges })
    }

    pub fn empty() -> Self {
        Matching::default()
    }

    /// Builds a matching from endpoint pairs.
    pub fn from_pairs(g: &WeightedGraph, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut ids = Vec::with_capacity(pairs.len());
        for &(u, v) in pairs {
            match g.edge_id(u, v) {
                Some(e) => ids.push(e),
                None => return input(format!("({u}, {v}) is not an edge")),
            }
        }
        Matching::new(g, ids)
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn weight(&self, g: &WeightedGraph) -> u64 {
        self.edges.iter().map(|&e| g.edge_weight(e)).sum()
    }

    /// Matched edge id per node.
    pub fn mates(&self, g: &WeightedGraph) -> Vec<Option<usize>> {
        let mut mate = vec![None; g.n()];
        for &e in &self.edges {
            let (u, v) = g.endpoints(e);
            mate[u] = Some(e);
            mate[v] = Some(e);
        }
        mate
    }

    /// Endpoint pairs of the matched edges.
    pub fn pairs(&self, g: &WeightedGraph) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&e| g.endpoints(e)).collect()
    }
}

/// A fractional cover with values in {0, 1/2, 1}, stored in halves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfIntegralCover {
    halves: Vec<u8>,
}

impl HalfIntegralCover {
    /// Validates the range of every value and feasibility on every edge.
    pub fn new(g: &WeightedGraph, halves: Vec<u8>) -> Result<Self> {
        if halves.len() != g.n() {
            return input(format!("expected {} values, got {}", g.n(), halves.len()));
        }
        if let Some(v) = halves.iter().position(|&h| h > 2) {
            return input(format!("node {v} has value {}/2 > 1", halves[v]));
        }
        for &(u, v) in g.edges() {
            if halves[u] + halves[v] < 2 {
                return invariant(format!("edge ({u}, {v}) is not fractionally covered"));
            }
        }
        Ok(HalfIntegralCover { halves })
    }

    /// Value of `v` in halves (0, 1 or 2).
    pub fn halves(&self, v: usize) -> u8 {
        self.halves[v]
    }

    fn class(&self, h: u8) -> Vec<usize> {
        (0..self.halves.len())
            .filter(|&v| self.halves[v] == h)
            .collect()
    }

    pub fn zeros(&self) -> Vec<usize> {
        self.class(0)
    }

    pub fn halves_set(&self) -> Vec<usize> {
        self.class(1)
    }

    pub fn ones(&self) -> Vec<usize> {
        self.class(2)
    }

    /// Twice the weight `Σ w(v)·x_v`.
    pub fn doubled_weight(&self, g: &WeightedGraph) -> u64 {
        (0..self.halves.len())
            .map(|v| u64::from(self.halves[v]) * g.node_weight(v))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_cover_on_small_graphs() {
        let edge = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        assert!(is_cover(&edge, &[0]).unwrap());
        assert!(!is_cover(&edge, &[]).unwrap());
        let tri = WeightedGraph::unit(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(is_cover(&tri, &[0, 1]).unwrap());
        assert!(is_cover(&tri, &[5]).is_err());
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(WeightedGraph::unit(2, vec![(0, 0)]).is_err());
        assert!(WeightedGraph::unit(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(WeightedGraph::unit(2, vec![(0, 2)]).is_err());
        assert!(WeightedGraph::node_weighted(2, vec![(0, 1)], vec![0, 1]).is_err());
        assert!(WeightedGraph::new(2, vec![(0, 1)], None, None).is_err());
        assert!(WeightedGraph::with_bound(2, vec![], Some(vec![1, 1]), None, 2000).is_err());
    }

    #[test]
    fn matching_rejects_shared_endpoint() {
        let g = WeightedGraph::unit(3, vec![(0, 1), (1, 2)]).unwrap();
        let err = Matching::new(&g, vec![0, 1]).unwrap_err();
        assert!(err.to_string().contains("node 1"));
    }

    #[test]
    fn two_coloring_detects_odd_cycles() {
        let tri = WeightedGraph::unit(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(tri.two_coloring().is_none());
        let c4 = WeightedGraph::unit(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(c4.two_coloring().unwrap(), vec![false, true, false, true]);
    }

    #[test]
    fn induced_subgraph_maps_ids() {
        let g = WeightedGraph::node_weighted(4, vec![(0, 1), (1, 2), (2, 3)], vec![1, 2, 3, 4])
            .unwrap();
        let sub = g.induced_subgraph(&[2, 1]).unwrap();
        assert_eq!(sub.graph.n(), 2);
        assert_eq!(sub.graph.m(), 1);
        assert_eq!(sub.edges, vec![1]);
        assert_eq!(sub.graph.node_weight(0), 3);
    }

    #[test]
    fn half_integral_cover_checks_feasibility() {
        let g = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        assert!(HalfIntegralCover::new(&g, vec![1, 1]).is_ok());
        assert!(HalfIntegralCover::new(&g, vec![1, 0]).is_err());
    }
}
