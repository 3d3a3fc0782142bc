//! Alternating paths and cycles of `M △ M_ref`, their decomposition into
//! short pieces, and swapping them into a matching.

use crate::error::{input, invariant, Result};
use crate::graph::{Matching, WeightedGraph};

/// Shape of an alternating structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    Path,
    Cycle,
}

/// An alternating path or cycle with its gain relative to a matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentingStructure {
    pub kind: StructureKind,
    /// Edge ids in walk order.
    pub edges: Vec<usize>,
    /// Nodes in walk order; a cycle does not repeat its start.
    pub nodes: Vec<usize>,
    /// `w(out-edges) − w(in-edges)`.
    pub gain: i128,
}

impl AugmentingStructure {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Short structures plus the matching edges released to cut long ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decomposition {
    /// Vertex-disjoint structures with positive gain, each of length `≤ ℓ`.
    pub structures: Vec<AugmentingStructure>,
    /// Light matching edges dropped from `M`, sorted.
    pub released: Vec<usize>,
}

impl Decomposition {
    /// Sum of gains minus the weight of the released edges.
    pub fn net_gain(&self, g: &WeightedGraph) -> i128 {
        let gains: i128 = self.structures.iter().map(|s| s.gain).sum();
        gains - self.released.iter().map(|&e| i128::from(g.edge_weight(e))).sum::<i128>()
    }

    /// Drops the released edges from `m`, then swaps every structure in.
    pub fn apply(&self, g: &WeightedGraph, m: &Matching) -> Result<Matching> {
        for &e in &self.released {
            if !m.contains(e) {
                return invariant(format!("released edge {e} is not matched"));
            }
        }
        let kept: Vec<usize> = m.edges().iter().copied().filter(|e| self.released.binary_search(e).is_err()).collect();
        let base = Matching::new(g, kept)?;
        apply_augmentations(g, &base, &self.structures)
    }
}

fn gain_of(g: &WeightedGraph, m: &Matching, edges: &[usize]) -> i128 {
    edges
        .iter()
        .map(|&e| {
            let w = i128::from(g.edge_weight(e));
            if m.contains(e) {
                -w
            } else {
                w
            }
        })
        .sum()
}

fn check_matching(g: &WeightedGraph, m: &Matching, name: &str) -> Result<()> {
    Matching::new(g, m.edges().to_vec())
        .map(|_| ())
        .map_err(|e| crate::Error::Invariant(format!("{name} is not a matching of this graph: {e}")))
}

/// Walks the component of `start` in a graph of maximum degree 2, leaving
/// each node by its smaller unused edge. Returns nodes, edges and whether
/// the walk closed a cycle.
fn walk(adj: &[Vec<(usize, usize)>], start: usize, seen: &mut [bool]) -> (Vec<usize>, Vec<usize>, bool) {
    let mut nodes = vec![start];
    let mut edges = Vec::new();
    seen[start] = true;
    let mut prev_edge = usize::MAX;
    let mut cur = start;
    loop {
        let next = adj[cur]
            .iter()
            .filter(|&&(_, e)| e != prev_edge)
            .min_by_key(|&&(_, e)| e)
            .copied();
        match next {
            Some((v, e)) if v == start => {
                edges.push(e);
                return (nodes, edges, true);
            }
            Some((v, e)) => {
                edges.push(e);
                nodes.push(v);
                seen[v] = true;
                prev_edge = e;
                cur = v;
            }
            None => return (nodes, edges, false),
        }
    }
}

/// Splits `M △ M_ref` into vertex-disjoint structures of length at most `ell`.
///
/// Components with non-positive gain are skipped. Components longer than
/// `ell` are cut into consecutive subpaths of `x = ⌈ell/3⌉` edges, the last
/// taking the remainder, and the lightest `M`-edge of each subpath is
/// released. The remaining pieces have length at most `3(x − 1) ≤ ell` and
/// their gains are taken relative to `M` without the released edges; only
/// pieces with positive gain are kept.
pub fn decompose_short_augmentations(
    g: &WeightedGraph,
    m: &Matching,
    m_ref: &Matching,
    ell: usize,
) -> Result<Decomposition> {
    if ell < 9 {
        return input(format!("piece length bound {ell} must be at least 9"));
    }
    check_matching(g, m, "M")?;
    check_matching(g, m_ref, "reference matching")?;
    let mut adj = vec![Vec::new(); g.n()];
    let diff = m.edges().iter().chain(m_ref.edges()).copied().filter(|&e| m.contains(e) != m_ref.contains(e));
    for e in diff {
        let (u, v) = g.endpoints(e);
        adj[u].push((v, e));
        adj[v].push((u, e));
    }

    let mut seen = vec![false; g.n()];
    let mut components = Vec::new();
    for v in 0..g.n() {
        if !seen[v] && adj[v].len() == 1 {
            components.push(walk(&adj, v, &mut seen));
        }
    }
    for v in 0..g.n() {
        if !seen[v] && adj[v].len() == 2 {
            components.push(walk(&adj, v, &mut seen));
        }
    }

    let x = ell.div_ceil(3);
    let mut out = Decomposition::default();
    for (nodes, edges, cyclic) in components {
        let gain = gain_of(g, m, &edges);
        if gain <= 0 {
            continue;
        }
        let kind = if cyclic { StructureKind::Cycle } else { StructureKind::Path };
        if edges.len() <= ell {
            out.structures.push(AugmentingStructure { kind, edges, nodes, gain });
            continue;
        }
        let len = edges.len();
        let count = len / x;
        let mut cut = vec![false; len];
        for p in 0..count {
            let end = if p + 1 == count { len } else { (p + 1) * x };
            let light = (p * x..end)
                .filter(|&i| m.contains(edges[i]))
                .min_by_key(|&i| (g.edge_weight(edges[i]), i));
            match light {
                Some(i) => {
                    cut[i] = true;
                    out.released.push(edges[i]);
                }
                None => return invariant("subpath without a matching edge"),
            }
        }
        // Node i sits between edges i-1 and i; a cycle rotates to start after a cut.
        let start = if cyclic { cut.iter().position(|&c| c).map_or(0, |i| i + 1) } else { 0 };
        let mut piece_edges = Vec::new();
        let mut piece_nodes = vec![nodes[start % nodes.len()]];
        for step in 0..len {
            let i = (start + step) % len;
            let head = if cyclic { nodes[(i + 1) % len] } else { nodes[i + 1] };
            if cut[i] {
                push_piece(g, m, &mut out, &mut piece_edges, &mut piece_nodes);
                piece_nodes = vec![head];
            } else {
                piece_edges.push(edges[i]);
                piece_nodes.push(head);
            }
        }
        push_piece(g, m, &mut out, &mut piece_edges, &mut piece_nodes);
    }
    out.released.sort_unstable();
    for s in &out.structures {
        if s.len() > ell {
            return invariant(format!("piece of length {} exceeds {ell}", s.len()));
        }
    }
    Ok(out)
}

fn push_piece(
    g: &WeightedGraph,
    m: &Matching,
    out: &mut Decomposition,
    edges: &mut Vec<usize>,
    nodes: &mut Vec<usize>,
) {
    if edges.is_empty() {
        return;
    }
    let gain = gain_of(g, m, edges);
    if gain > 0 {
        out.structures.push(AugmentingStructure {
            kind: StructureKind::Path,
            edges: std::mem::take(edges),
            nodes: std::mem::take(nodes),
            gain,
        });
    } else {
        edges.clear();
    }
}

/// Swaps the in-edges of every structure for its out-edges.
///
/// Structures must be vertex-disjoint and alternate with respect to `m`;
/// the result is checked to be a matching of weight `w(m) + Σ gain`.
pub fn apply_augmentations(
    g: &WeightedGraph,
    m: &Matching,
    structures: &[AugmentingStructure],
) -> Result<Matching> {
    let mut used = vec![false; g.n()];
    let mut remove = Vec::new();
    let mut add = Vec::new();
    let mut gain = 0i128;
    for (idx, s) in structures.iter().enumerate() {
        let expected_nodes = match s.kind {
            StructureKind::Path => s.edges.len() + 1,
            StructureKind::Cycle => s.edges.len(),
        };
        if s.edges.is_empty() || s.nodes.len() != expected_nodes {
            return invariant(format!("structure {idx} has inconsistent nodes and edges"));
        }
        if s.kind == StructureKind::Cycle && s.edges.len() % 2 == 1 {
            return invariant(format!("structure {idx} is an odd cycle"));
        }
        for (i, &e) in s.edges.iter().enumerate() {
            if e >= g.m() {
                return input(format!("edge id {e} out of range"));
            }
            let a = s.nodes[i];
            let b = s.nodes[(i + 1) % s.nodes.len()];
            if g.edge_id(a, b) != Some(e) {
                return invariant(format!("structure {idx} edge {e} does not join its walk nodes"));
            }
            if i > 0 && m.contains(e) == m.contains(s.edges[i - 1]) {
                return invariant(format!("structure {idx} does not alternate at edge {e}"));
            }
            if m.contains(e) {
                remove.push(e);
            } else {
                add.push(e);
            }
        }
        for &v in &s.nodes {
            if std::mem::replace(&mut used[v], true) {
                return invariant(format!("structures overlap at node {v}"));
            }
        }
        let actual = gain_of(g, m, &s.edges);
        if actual != s.gain {
            return invariant(format!("structure {idx} records gain {} but has {actual}", s.gain));
        }
        gain += actual;
    }
    remove.sort_unstable();
    let mut edges: Vec<usize> = m.edges().iter().copied().filter(|e| remove.binary_search(e).is_err()).collect();
    edges.extend(add);
    let result = Matching::new(g, edges)?;
    if i128::from(result.weight(g)) != i128::from(m.weight(g)) + gain {
        return invariant("swapped matching weight differs from the recorded gains");
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_free_edge() {
        let g = WeightedGraph::edge_weighted(2, vec![(0, 1, 5)]).unwrap();
        let m_ref = Matching::new(&g, vec![0]).unwrap();
        let d = decompose_short_augmentations(&g, &Matching::empty(), &m_ref, 9).unwrap();
        assert_eq!(d.structures.len(), 1);
        assert_eq!(d.structures[0].gain, 5);
        assert_eq!(d.structures[0].kind, StructureKind::Path);
        assert_eq!(d.apply(&g, &Matching::empty()).unwrap().edges(), &[0]);
    }

    #[test]
    fn four_cycle_swaps_to_heavy_edges() {
        let g = WeightedGraph::edge_weighted(4, vec![(0, 1, 3), (1, 2, 1), (2, 3, 3), (3, 0, 1)]).unwrap();
        let m = Matching::new(&g, vec![1, 3]).unwrap();
        let m_ref = Matching::new(&g, vec![0, 2]).unwrap();
        let d = decompose_short_augmentations(&g, &m, &m_ref, 9).unwrap();
        assert_eq!(d.structures.len(), 1);
        assert_eq!(d.structures[0].kind, StructureKind::Cycle);
        assert_eq!(d.structures[0].gain, 4);
        let out = d.apply(&g, &m).unwrap();
        assert_eq!(out.edges(), &[0, 2]);
        assert_eq!(out.weight(&g), 6);
    }

    #[test]
    fn long_path_is_cut_into_short_pieces() {
        let n = 21;
        let edges: Vec<(usize, usize, u64)> =
            (0..n - 1).map(|i| (i, i + 1, if i % 2 == 0 { 4 } else { 3 })).collect();
        let g = WeightedGraph::edge_weighted(n, edges).unwrap();
        let m = Matching::new(&g, (1..n - 1).step_by(2).collect()).unwrap();
        let m_ref = Matching::new(&g, (0..n - 1).step_by(2).collect()).unwrap();
        let d = decompose_short_augmentations(&g, &m, &m_ref, 9).unwrap();
        assert!(!d.structures.is_empty());
        assert!(d.structures.iter().all(|s| s.len() <= 9 && s.gain > 0));
        let out = d.apply(&g, &m).unwrap();
        assert_eq!(i128::from(out.weight(&g)), i128::from(m.weight(&g)) + d.net_gain(&g));
    }

    #[test]
    fn empty_list_keeps_matching() {
        let g = WeightedGraph::edge_weighted(2, vec![(0, 1, 5)]).unwrap();
        let m = Matching::new(&g, vec![0]).unwrap();
        assert_eq!(apply_augmentations(&g, &m, &[]).unwrap(), m);
    }

    #[test]
    fn overlap_is_rejected() {
        let g = WeightedGraph::edge_weighted(3, vec![(0, 1, 2), (1, 2, 2)]).unwrap();
        let a = AugmentingStructure { kind: StructureKind::Path, edges: vec![0], nodes: vec![0, 1], gain: 2 };
        let b = AugmentingStructure { kind: StructureKind::Path, edges: vec![1], nodes: vec![1, 2], gain: 2 };
        assert!(apply_augmentations(&g, &Matching::empty(), &[a, b]).is_err());
    }

    #[test]
    fn short_bound_rejected() {
        let g = WeightedGraph::edge_weighted(2, vec![(0, 1, 5)]).unwrap();
        assert!(decompose_short_augmentations(&g, &Matching::empty(), &Matching::empty(), 8).is_err());
    }
}
