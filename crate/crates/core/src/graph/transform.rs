use super::WeightedGraph;
use crate::error::{input, Result};

/// Bipartite double cover: node `(v, i)` gets id `2v + i`, every edge
/// `{u, v}` becomes `{(u, 0), (v, 1)}` and `{(u, 1), (v, 0)}`.
///
/// Both copies inherit the node weight; edge weights, when present, are
/// copied to both new edges. The side of a node is `id % 2`.
pub fn double_cover(g: &WeightedGraph) -> Result<WeightedGraph> {
    let weights = g.require_node_weights("double cover")?;
    let node_weights = Some(weights.iter().flat_map(|&w| [w, w]).collect());
    let mut edges = Vec::with_capacity(2 * g.m());
    for &(u, v) in g.edges() {
        edges.push((2 * u, 2 * v + 1));
        edges.push((2 * u + 1, 2 * v));
    }
    let edge_weights = g
        .edge_weights()
        .map(|w| w.iter().flat_map(|&x| [x, x]).collect());
    WeightedGraph::build(
        2 * g.n(),
        edges,
        node_weights,
        edge_weights,
        g.max_weight(),
        false,
    )
}

/// Where one original edge went in a subdivided graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdividedEdge {
    /// Original endpoints `(v_0, v_{2k+1})`, smaller id first.
    pub endpoints: (usize, usize),
    /// Inner nodes `v_1 .. v_{2k}` in path order.
    pub inner: Vec<usize>,
}

impl SubdividedEdge {
    /// The full path `v_0, v_1, .., v_{2k+1}`.
    pub fn path(&self) -> Vec<usize> {
        let mut p = Vec::with_capacity(self.inner.len() + 2);
        p.push(self.endpoints.0);
        p.extend_from_slice(&self.inner);
        p.push(self.endpoints.1);
        p
    }
}

/// Mapping from a graph to its subdivision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    pub k: usize,
    /// Node count of the original graph; its nodes keep their ids.
    pub original_nodes: usize,
    /// One entry per original edge, in edge-id order.
    pub paths: Vec<SubdividedEdge>,
}

/// Replaces every edge by a path of `2k + 1` edges through `2k` new nodes.
///
/// Inner nodes are numbered from `n` upwards in edge-id order. The result
/// carries unit node weights.
pub fn subdivide_edges(g: &WeightedGraph, k: usize) -> Result<(WeightedGraph, Subdivision)> {
    if k < 1 {
        return input("subdivision parameter k must be at least 1");
    }
    if g.node_weights().is_some_and(|w| w.iter().any(|&x| x != 1))
        || g.edge_weights().is_some_and(|w| w.iter().any(|&x| x != 1))
    {
        return input("subdivision expects an unweighted graph");
    }
    let n = g.n();
    let total = n + 2 * k * g.m();
    let mut edges = Vec::with_capacity((2 * k + 1) * g.m());
    let mut paths = Vec::with_capacity(g.m());
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let inner: Vec<usize> = (0..2 * k).map(|j| n + 2 * k * i + j).collect();
        let mut prev = u;
        for &x in &inner {
            edges.push((prev, x));
            prev = x;
        }
        edges.push((prev, v));
        paths.push(SubdividedEdge {
            endpoints: (u, v),
            inner,
        });
    }
    let h = WeightedGraph::build(total, edges, Some(vec![1; total]), None, 1, false)?;
    Ok((
        h,
        Subdivision {
            k,
            original_nodes: n,
            paths,
        },
    ))
}
