//! Bipartite subgraph induced by a node coloring and a current matching.

use crate::error::{input, invariant, Result};
use crate::graph::{Matching, Subgraph, WeightedGraph};

/// Colored nodes, the kept nodes and edges, and the set-aside matching edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledBipartition {
    pub color: Vec<bool>,
    /// Free nodes and endpoints of bichromatic matching edges.
    pub included: Vec<bool>,
    /// Bichromatic edges with both endpoints included, sorted.
    pub edges: Vec<usize>,
    /// Monochromatic matching edges, sorted.
    pub carried: Vec<usize>,
}

impl SampledBipartition {
    /// The kept edges as a subgraph on all nodes; sides are the colors.
    pub fn subgraph(&self, g: &WeightedGraph) -> Result<Subgraph> {
        g.edge_subgraph(&self.edges)
    }

    /// `carried ∪ chosen`, where `chosen` are parent ids of kept edges.
    pub fn combine(&self, g: &WeightedGraph, chosen: &[usize]) -> Result<Matching> {
        let mut edges = self.carried.clone();
        for &e in chosen {
            if self.edges.binary_search(&e).is_err() {
                return invariant(format!("edge {e} was not kept by the sample"));
            }
            edges.push(e);
        }
        Matching::new(g, edges)
    }
}

/// Applies the coloring rule: nodes of monochromatic matching edges are
/// dropped and those edges carried; every bichromatic edge between kept
/// nodes is kept.
pub fn sample_bipartition(g: &WeightedGraph, m: &Matching, color: Vec<bool>) -> Result<SampledBipartition> {
    if color.len() != g.n() {
        return input(format!("{} colors for {} nodes", color.len(), g.n()));
    }
    let mut included = vec![true; g.n()];
    let mut carried = Vec::new();
    for &e in m.edges() {
        if e >= g.m() {
            return input(format!("edge id {e} out of range"));
        }
        let (u, v) = g.endpoints(e);
        if color[u] == color[v] {
            included[u] = false;
            included[v] = false;
            carried.push(e);
        }
    }
    let edges: Vec<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(_, &(u, v))| included[u] && included[v] && color[u] != color[v])
        .map(|(e, _)| e)
        .collect();
    Ok(SampledBipartition { color, included, edges, carried })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_color_keeps_nothing() {
        let g = WeightedGraph::edge_weighted(3, vec![(0, 1, 1), (1, 2, 1)]).unwrap();
        let m = Matching::new(&g, vec![0]).unwrap();
        let s = sample_bipartition(&g, &m, vec![true; 3]).unwrap();
        assert!(s.edges.is_empty());
        assert_eq!(s.carried, vec![0]);
    }

    #[test]
    fn opposite_colors_keep_the_edge() {
        let g = WeightedGraph::edge_weighted(2, vec![(0, 1, 1)]).unwrap();
        let s = sample_bipartition(&g, &Matching::empty(), vec![false, true]).unwrap();
        assert_eq!(s.edges, vec![0]);
        assert!(s.carried.is_empty());
    }

    #[test]
    fn monochromatic_matched_edge_drops_both_endpoints() {
        let g = WeightedGraph::edge_weighted(4, vec![(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let m = Matching::new(&g, vec![1]).unwrap();
        let s = sample_bipartition(&g, &m, vec![false, true, true, false]).unwrap();
        assert_eq!(s.included, vec![true, false, false, true]);
        assert!(s.edges.is_empty());
        assert_eq!(s.combine(&g, &[]).unwrap().edges(), &[1]);
        assert!(s.combine(&g, &[0]).is_err());
    }
}
