//! Layered structure of shortest augmenting paths and path counting.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{input, Result};
use crate::fractional::FractionalAssignment;
use crate::graph::WeightedGraph;

/// Layers `V_0..V_d` with the links between consecutive layers.
///
/// `side[v]` is `false` on the A side. A link `(e, upper, lower)` joins
/// `upper ∈ V_i` to `lower ∈ V_{i+1}`; links leaving odd layers carry
/// positive value. Every top-down path over active nodes and links is an
/// augmenting path of length `d` when no shorter one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredGraph {
    pub d: usize,
    pub layers: Vec<Vec<usize>>,
    /// `links[i]` joins layer `i` to layer `i + 1`.
    pub links: Vec<Vec<(usize, usize, usize)>>,
    /// Activity per node id.
    pub active_node: Vec<bool>,
    /// Activity per link, aligned with `links`.
    pub active_link: Vec<Vec<bool>>,
}

impl LayeredGraph {
    /// Layered graph over explicit layers and links, all active.
    /// Node ids must be below `n`; links must join consecutive layers.
    pub fn from_layers(
        n: usize,
        layers: Vec<Vec<usize>>,
        links: Vec<Vec<(usize, usize, usize)>>,
    ) -> Result<Self> {
        if layers.is_empty() || links.len() + 1 != layers.len() {
            return input("need one link list between each pair of consecutive layers");
        }
        let mut level = vec![None; n];
        for (i, layer) in layers.iter().enumerate() {
            for &v in layer {
                if v >= n || level[v].replace(i).is_some() {
                    return input(format!("node {v} is out of range or in two layers"));
                }
            }
        }
        for (i, ls) in links.iter().enumerate() {
            if ls
                .iter()
                .any(|&(_, u, v)| level.get(u) != Some(&Some(i)) || level.get(v) != Some(&Some(i + 1)))
            {
                return input(format!("a link leaving layer {i} does not reach layer {}", i + 1));
            }
        }
        let active_link = links.iter().map(|l| vec![true; l.len()]).collect();
        Ok(LayeredGraph {
            d: layers.len() - 1,
            layers,
            links,
            active_node: vec![true; n],
            active_link,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.layers.iter().all(Vec::is_empty)
    }

    pub fn deactivate_node(&mut self, v: usize) {
        self.active_node[v] = false;
    }

    pub fn deactivate_link(&mut self, level: usize, index: usize) {
        self.active_link[level][index] = false;
    }
}

/// Top-down path counts through every node and link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCounts {
    /// Paths from layer 0 down to each node, by node id.
    pub from_top: Vec<BigUint>,
    /// Paths from each node down to layer `d`, by node id.
    pub to_bottom: Vec<BigUint>,
    /// Paths through each node.
    pub node: Vec<BigUint>,
    /// Paths through each link, aligned with `LayeredGraph::links`.
    pub link: Vec<Vec<BigUint>>,
    pub total: BigUint,
}

/// Counts active top-down paths: `count(v) = α(v)·β(v)` and
/// `count(u, v) = α(u)·β(v)`.
pub fn count_paths(layered: &LayeredGraph) -> PathCounts {
    let n = layered.active_node.len();
    let d = layered.d;
    let mut alpha = vec![BigUint::zero(); n];
    let mut beta = vec![BigUint::zero(); n];
    for &v in &layered.layers[0] {
        if layered.active_node[v] {
            alpha[v] = BigUint::from(1u8);
        }
    }
    for i in 0..d {
        for (j, &(_, u, v)) in layered.links[i].iter().enumerate() {
            if layered.active_link[i][j] && layered.active_node[v] && !alpha[u].is_zero() {
                let add = alpha[u].clone();
                alpha[v] += add;
            }
        }
    }
    for &v in &layered.layers[d] {
        if layered.active_node[v] {
            beta[v] = BigUint::from(1u8);
        }
    }
    for i in (0..d).rev() {
        for (j, &(_, u, v)) in layered.links[i].iter().enumerate() {
            if layered.active_link[i][j] && layered.active_node[u] && !beta[v].is_zero() {
                let add = beta[v].clone();
                beta[u] += add;
            }
        }
    }
    let node: Vec<BigUint> = alpha.iter().zip(&beta).map(|(a, b)| a * b).collect();
    let link = layered
        .links
        .iter()
        .enumerate()
        .map(|(i, ls)| {
            ls.iter()
                .enumerate()
                .map(|(j, &(_, u, v))| {
                    if layered.active_link[i][j] {
                        &alpha[u] * &beta[v]
                    } else {
                        BigUint::zero()
                    }
                })
                .collect()
        })
        .collect();
    let total = layered.layers[0].iter().map(|&v| &node[v]).sum();
    PathCounts {
        from_top: alpha,
        to_bottom: beta,
        node,
        link,
        total,
    }
}

fn check_sides(g: &WeightedGraph, side: &[bool]) -> Result<()> {
    if side.len() != g.n() {
        return input("one side flag per node required");
    }
    if g.edges().iter().any(|&(u, v)| side[u] == side[v]) {
        return input("side assignment is not a bipartition");
    }
    Ok(())
}

/// Length of a shortest augmenting path, or `None` when there is none.
pub fn shortest_augmenting_length(
    g: &WeightedGraph,
    side: &[bool],
    a: &FractionalAssignment,
) -> Result<Option<usize>> {
    check_sides(g, side)?;
    let slack = a.slack_nums(g);
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    for v in 0..g.n() {
        if !side[v] && slack[v] > 0 {
            dist[v] = 0;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        if side[v] && slack[v] > 0 {
            return Ok(Some(dist[v]));
        }
        for &(u, e) in g.neighbors(v) {
            let usable = !side[v] || a.y_num(e) > 0;
            if usable && dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    Ok(None)
}

/// Builds `V_0..V_d` by alternating BFS from the positive-slack A nodes:
/// odd layers take unvisited B neighbors over any edge, even layers take
/// unvisited A neighbors over positive edges, and `V_d` keeps only
/// positive-slack nodes.
pub fn build_layers(
    g: &WeightedGraph,
    side: &[bool],
    a: &FractionalAssignment,
    d: usize,
) -> Result<LayeredGraph> {
    if d == 0 || d % 2 == 0 {
        return input(format!("layer depth {d} must be odd and at least 1"));
    }
    check_sides(g, side)?;
    let slack = a.slack_nums(g);
    let mut level = vec![usize::MAX; g.n()];
    let mut layers = vec![Vec::new(); d + 1];
    let mut links = vec![Vec::new(); d];
    for v in 0..g.n() {
        if !side[v] && slack[v] > 0 {
            level[v] = 0;
            layers[0].push(v);
        }
    }
    for i in 1..=d {
        let (prev, rest) = layers.split_at_mut(i);
        let prev = &prev[i - 1];
        let mut next = Vec::new();
        for &u in prev {
            for &(v, e) in g.neighbors(u) {
                if i % 2 == 0 && a.y_num(e) <= 0 {
                    continue;
                }
                if i == d && slack[v] <= 0 {
                    continue;
                }
                if level[v] == usize::MAX {
                    level[v] = i;
                    next.push(v);
                }
                if level[v] == i {
                    links[i - 1].push((e, u, v));
                }
            }
        }
        next.sort_unstable();
        rest[0] = next;
    }
    for ls in &mut links {
        ls.sort_unstable_by_key(|&(e, u, v)| (u, v, e));
    }
    let active_link = links.iter().map(|l| vec![true; l.len()]).collect();
    Ok(LayeredGraph {
        d,
        layers,
        links,
        active_node: vec![true; g.n()],
        active_link,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_path(n: usize) -> WeightedGraph {
        WeightedGraph::unit(n, (1..n).map(|v| (v - 1, v)).collect()).unwrap()
    }

    #[test]
    fn single_edge_layers() {
        let g = unit_path(2);
        let a = FractionalAssignment::zero(&g, 1).unwrap();
        let l = build_layers(&g, &[false, true], &a, 1).unwrap();
        assert_eq!(l.layers, vec![vec![0], vec![1]]);
        assert!(build_layers(&g, &[false, true], &a, 2).is_err());
        assert!(build_layers(&g, &[false, true], &a, 0).is_err());
    }

    #[test]
    fn saturated_graph_has_empty_layers() {
        let g = unit_path(2);
        let a = FractionalAssignment::from_numerators(&g, 1, vec![1]).unwrap();
        let l = build_layers(&g, &[false, true], &a, 1).unwrap();
        assert!(l.is_empty());
    }

    #[test]
    fn p4_with_first_edge_saturated() {
        // a1=0, b1=1, a2=2, b2=3.
        let g = unit_path(4);
        let a = FractionalAssignment::from_numerators(&g, 1, vec![1, 0, 0]).unwrap();
        let l = build_layers(&g, &[false, true, false, true], &a, 1).unwrap();
        assert_eq!(l.layers, vec![vec![2], vec![3]]);
    }

    #[test]
    fn fan_counts() {
        let l = LayeredGraph::from_layers(
            4,
            vec![vec![0], vec![1, 2], vec![3]],
            vec![vec![(0, 0, 1), (1, 0, 2)], vec![(2, 1, 3), (3, 2, 3)]],
        )
        .unwrap();
        let c = count_paths(&l);
        assert_eq!(c.node[0], BigUint::from(2u8));
        assert_eq!(c.node[3], BigUint::from(2u8));
        assert_eq!(c.node[1], BigUint::from(1u8));
        assert!(c.link.iter().flatten().all(|x| *x == BigUint::from(1u8)));
        assert_eq!(c.total, BigUint::from(2u8));
    }

    #[test]
    fn shortest_length() {
        let g = unit_path(4);
        let side = [false, true, false, true];
        let a = FractionalAssignment::from_numerators(&g, 2, vec![1, 1, 1]).unwrap();
        assert_eq!(shortest_augmenting_length(&g, &side, &a).unwrap(), Some(3));
        let a = FractionalAssignment::from_numerators(&g, 1, vec![1, 0, 1]).unwrap();
        assert_eq!(shortest_augmenting_length(&g, &side, &a).unwrap(), None);
    }
}
