//! BFS trees and pipelined convergecast/broadcast over rooted trees.

use std::collections::VecDeque;

use super::{bit_len, run_protocol, Message, NodeContext, NodeProgram, RoundStats, SimConfig};
use crate::error::{input, Result};
use crate::graph::WeightedGraph;

/// A rooted tree over a subset of a host graph's nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    pub root: usize,
    /// Parent per host node; `None` for the root and for non-members.
    pub parent: Vec<Option<usize>>,
    /// Depth per host node; `None` for non-members.
    pub depth: Vec<Option<usize>>,
}

impl RootedTree {
    /// Builds a tree from parent pointers over the given members.
    pub fn from_parents(n: usize, root: usize, parents: &[(usize, usize)]) -> Result<Self> {
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for &(child, p) in parents {
            if child >= n || p >= n {
                return input("tree node out of range");
            }
            parent[child] = Some(p);
            children[p].push(child);
        }
        let mut depth = vec![None; n];
        depth[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        let mut seen = 1;
        while let Some(v) = queue.pop_front() {
            for &c in &children[v] {
                if depth[c].is_some() {
                    return input("parent pointers contain a cycle");
                }
                depth[c] = Some(depth[v].unwrap_or(0) + 1);
                seen += 1;
                queue.push_back(c);
            }
        }
        if seen != parents.len() + 1 {
            return input("parent pointers do not form a tree under the root");
        }
        Ok(RootedTree {
            root,
            parent,
            depth,
        })
    }

    pub fn contains(&self, v: usize) -> bool {
        self.depth.get(v).is_some_and(Option::is_some)
    }

    /// Member nodes in id order.
    pub fn members(&self) -> Vec<usize> {
        (0..self.depth.len()).filter(|&v| self.contains(v)).collect()
    }

    pub fn size(&self) -> usize {
        self.depth.iter().filter(|d| d.is_some()).count()
    }

    /// Maximum depth.
    pub fn height(&self) -> usize {
        self.depth.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Children lists indexed by host node.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(v);
            }
        }
        ch
    }

    /// `(child, parent)` tree edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
            .collect()
    }

    /// Longest path length inside the tree.
    pub fn diameter(&self) -> usize {
        let members = self.members();
        if members.len() <= 1 {
            return 0;
        }
        let mut adj = vec![Vec::new(); self.parent.len()];
        for (c, p) in self.edges() {
            adj[c].push(p);
            adj[p].push(c);
        }
        let far = |s: usize| -> (usize, usize) {
            let mut dist = vec![usize::MAX; adj.len()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            let mut best = (0, s);
            while let Some(v) = queue.pop_front() {
                if dist[v] > best.0 {
                    best = (dist[v], v);
                }
                for &u in &adj[v] {
                    if dist[u] == usize::MAX {
                        dist[u] = dist[v] + 1;
                        queue.push_back(u);
                    }
                }
            }
            best
        };
        let (_, a) = far(self.root);
        far(a).0
    }

    /// Checks that every tree edge is a graph edge.
    pub fn is_subgraph_of(&self, g: &WeightedGraph) -> bool {
        self.parent.len() == g.n() && self.edges().iter().all(|&(c, p)| g.edge_id(c, p).is_some())
    }
}

struct BfsNode {
    reached: bool,
    parent: Option<usize>,
    depth: usize,
    targets: Vec<usize>,
    neighbors: Vec<usize>,
    done: bool,
}

impl NodeProgram for BfsNode {
    type Msg = ();
    type Output = (bool, Option<usize>, usize);

    fn send(&mut self, _round: u64) -> Vec<(usize, ())> {
        if !self.reached {
            return Vec::new();
        }
        self.done = true;
        self.targets.drain(..).map(|u| (u, ())).collect()
    }

    fn receive(&mut self, round: u64, inbox: Vec<(usize, ())>) {
        if self.reached || inbox.is_empty() {
            return;
        }
        self.reached = true;
        self.parent = Some(inbox[0].0);
        self.depth = round as usize;
        let senders: Vec<usize> = inbox.iter().map(|&(u, _)| u).collect();
        self.targets = self
            .neighbors
            .iter()
            .copied()
            .filter(|u| senders.binary_search(u).is_err())
            .collect();
        self.done = self.targets.is_empty();
    }

    fn halted(&self) -> bool {
        self.done
    }

    fn passive(&self) -> bool {
        !self.reached
    }

    fn output(self) -> (bool, Option<usize>, usize) {
        (self.reached, self.parent, self.depth)
    }
}

/// Distributed BFS from `root`; a node's parent is its smallest-id sender.
/// Only the root's component joins the tree.
pub fn bfs_tree(g: &WeightedGraph, root: usize, config: &SimConfig) -> Result<(RootedTree, RoundStats)> {
    g.check_node(root)?;
    let (out, stats) = run_protocol(g, config, |ctx: &NodeContext| {
        let neighbors: Vec<usize> = ctx.neighbors.iter().map(|&(u, _)| u).collect();
        let is_root = ctx.id == root;
        BfsNode {
            reached: is_root,
            parent: None,
            depth: 0,
            targets: if is_root { neighbors.clone() } else { Vec::new() },
            done: is_root && neighbors.is_empty(),
            neighbors,
        }
    })?;
    let mut tree = RootedTree {
        root,
        parent: vec![None; g.n()],
        depth: vec![None; g.n()],
    };
    for (v, (reached, parent, depth)) in out.into_iter().enumerate() {
        if reached {
            tree.parent[v] = parent;
            tree.depth[v] = Some(depth);
        }
    }
    Ok((tree, stats))
}

/// Aggregation operator for [`tree_aggregate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateOp {
    /// Item-wise sum.
    Sum,
    /// Item-wise minimum.
    Min,
    /// Item-wise sum, then the 1-based index of the smallest total.
    ArgMin,
}

/// Result of a convergecast plus broadcast.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    /// Item-wise aggregate at the root.
    pub items: Vec<u128>,
    /// For `ArgMin`, the 1-based index of the smallest total (ties to the smaller index).
    pub argmin: Option<usize>,
    /// What each tree node learned from the broadcast, indexed by host node.
    pub learned: Vec<Option<Vec<u128>>>,
    /// Round in which the root held the full aggregate.
    pub upcast_rounds: u64,
}

#[derive(Clone)]
enum AggMsg {
    Up(Vec<u128>),
    Down(Vec<u128>),
}

impl Message for AggMsg {
    fn bits(&self) -> usize {
        let items = match self {
            AggMsg::Up(v) | AggMsg::Down(v) => v,
        };
        1 + items.iter().map(|&x| bit_len(x)).sum::<usize>()
    }
}

struct AggNode {
    member: bool,
    is_root: bool,
    parent: Option<usize>,
    children: Vec<usize>,
    op: AggregateOp,
    width: usize,
    acc: Vec<u128>,
    /// Children that have delivered each batch.
    reported: Vec<usize>,
    /// Batches delivered so far by each child, aligned with `children`.
    child_batches: Vec<usize>,
    next_up: usize,
    batches: usize,
    result: Option<Vec<u128>>,
    result_batches: usize,
    down_buffer: Vec<u128>,
    down_received: usize,
    next_down: usize,
    upcast_round: u64,
    done: bool,
}

impl AggNode {
    fn batch_range(&self, b: usize, len: usize) -> std::ops::Range<usize> {
        let lo = b * self.width;
        lo..(lo + self.width).min(len)
    }

    fn combine(&mut self, b: usize, vals: &[u128]) {
        let range = self.batch_range(b, self.acc.len());
        for (slot, &x) in self.acc[range].iter_mut().zip(vals) {
            *slot = match self.op {
                AggregateOp::Sum | AggregateOp::ArgMin => *slot + x,
                AggregateOp::Min => (*slot).min(x),
            };
        }
    }

    fn finish_root(&mut self, round: u64) {
        let result = match self.op {
            AggregateOp::ArgMin => {
                let mut best = 0;
                for (i, &x) in self.acc.iter().enumerate() {
                    if x < self.acc[best] {
                        best = i;
                    }
                }
                vec![(best + 1) as u128]
            }
            _ => self.acc.clone(),
        };
        self.result_batches = result.len().div_ceil(self.width);
        self.down_received = self.result_batches;
        self.down_buffer = result.clone();
        self.result = Some(result);
        self.upcast_round = round;
        self.done = self.children.is_empty();
    }
}

impl NodeProgram for AggNode {
    type Msg = AggMsg;
    type Output = (Option<Vec<u128>>, u64);

    fn send(&mut self, _round: u64) -> Vec<(usize, AggMsg)> {
        let mut out = Vec::new();
        if !self.is_root && self.next_up < self.batches && self.reported[self.next_up] == self.children.len()
        {
            let range = self.batch_range(self.next_up, self.acc.len());
            if let Some(p) = self.parent {
                out.push((p, AggMsg::Up(self.acc[range].to_vec())));
            }
            self.next_up += 1;
        } else if self.next_down < self.down_received {
            let range = self.batch_range(self.next_down, self.down_buffer.len());
            let batch = self.down_buffer[range].to_vec();
            out.extend(self.children.iter().map(|&c| (c, AggMsg::Down(batch.clone()))));
            self.next_down += 1;
            if self.next_down == self.result_batches {
                self.done = true;
            }
        }
        out
    }

    fn receive(&mut self, round: u64, inbox: Vec<(usize, AggMsg)>) {
        for (from, msg) in inbox {
            match msg {
                AggMsg::Up(vals) => {
                    let Ok(slot) = self.children.binary_search(&from) else {
                        continue;
                    };
                    let b = self.child_batches[slot];
                    self.child_batches[slot] += 1;
                    self.combine(b, &vals);
                    self.reported[b] += 1;
                }
                AggMsg::Down(vals) => {
                    self.down_buffer.extend(vals);
                    self.down_received += 1;
                    if self.down_received == self.result_batches {
                        self.result = Some(self.down_buffer.clone());
                        if self.children.is_empty() {
                            self.done = true;
                        }
                    }
                }
            }
        }
        if self.is_root && self.result.is_none() && self.reported.iter().all(|&r| r == self.children.len())
        {
            self.finish_root(round);
        }
    }

    fn halted(&self) -> bool {
        !self.member || self.done
    }

    fn output(self) -> (Option<Vec<u128>>, u64) {
        (if self.member { self.result } else { None }, self.upcast_round)
    }
}

/// Pipelined convergecast of per-node item vectors to the root, then a
/// pipelined broadcast of the result. `values[v]` must have the same length
/// for every tree member; at most `pipeline_width` items travel per message.
pub fn tree_aggregate(
    g: &WeightedGraph,
    tree: &RootedTree,
    values: &[Vec<u128>],
    op: AggregateOp,
    pipeline_width: usize,
    config: &SimConfig,
) -> Result<(Aggregate, RoundStats)> {
    if pipeline_width == 0 {
        return input("pipeline width must be at least 1");
    }
    if values.len() != g.n() || !tree.is_subgraph_of(g) {
        return input("tree or values do not match the graph");
    }
    let k = values[tree.root].len();
    if k == 0 {
        return input("aggregate needs at least one item");
    }
    if tree.members().iter().any(|&v| values[v].len() != k) {
        return input("every tree node needs the same number of items");
    }
    let children = tree.children();
    let batches = k.div_ceil(pipeline_width);
    let result_len = if op == AggregateOp::ArgMin { 1 } else { k };
    let (out, stats) = run_protocol(g, config, |ctx: &NodeContext| {
        let v = ctx.id;
        let member = tree.contains(v);
        let mut node = AggNode {
            member,
            is_root: v == tree.root,
            parent: tree.parent[v],
            children: if member { children[v].clone() } else { Vec::new() },
            op,
            width: pipeline_width,
            acc: if member { values[v].clone() } else { Vec::new() },
            reported: vec![0; batches],
            child_batches: vec![0; if member { children[v].len() } else { 0 }],
            next_up: 0,
            batches,
            result: None,
            result_batches: result_len.div_ceil(pipeline_width),
            down_buffer: Vec::new(),
            down_received: 0,
            next_down: 0,
            upcast_round: 0,
            done: false,
        };
        if node.is_root && node.children.is_empty() {
            node.finish_root(0);
        }
        node
    })?;
    let mut learned = vec![None; g.n()];
    let mut upcast_rounds = 0;
    for (v, (res, up)) in out.into_iter().enumerate() {
        if v == tree.root {
            upcast_rounds = up;
        }
        learned[v] = res;
    }
    let root_result = learned[tree.root].clone().unwrap_or_default();
    let (items, argmin) = if op == AggregateOp::ArgMin {
        let mut totals = vec![0u128; k];
        for v in tree.members() {
            for (t, x) in totals.iter_mut().zip(&values[v]) {
                *t += x;
            }
        }
        (totals, root_result.first().map(|&i| i as usize))
    } else {
        (root_result, None)
    };
    Ok((
        Aggregate {
            items,
            argmin,
            learned,
            upcast_rounds,
        },
        stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GenParams, GraphKind};

    fn graph(kind: GraphKind) -> WeightedGraph {
        generate(&kind, &GenParams::default(), 0).unwrap()
    }

    #[test]
    fn bfs_depths() {
        let path = graph(GraphKind::Path { n: 5 });
        let (t, _) = bfs_tree(&path, 0, &SimConfig::for_graph(&path)).unwrap();
        assert_eq!(t.height(), 4);
        let star = WeightedGraph::unit(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let (t, _) = bfs_tree(&star, 0, &SimConfig::for_graph(&star)).unwrap();
        assert_eq!(t.height(), 1);
        let cycle = graph(GraphKind::Cycle { n: 6 });
        for root in 0..6 {
            let (t, _) = bfs_tree(&cycle, root, &SimConfig::for_graph(&cycle)).unwrap();
            assert_eq!(t.height(), 3);
            assert!(t.is_subgraph_of(&cycle));
        }
    }

    #[test]
    fn flood_on_path_takes_diameter_rounds() {
        let path = graph(GraphKind::Path { n: 4 });
        let (t, stats) = bfs_tree(&path, 0, &SimConfig::for_graph(&path)).unwrap();
        assert_eq!(t.size(), 4);
        assert_eq!(stats.rounds, 3);
    }

    #[test]
    fn bfs_parent_is_smallest_sender() {
        let g = WeightedGraph::unit(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let (t, _) = bfs_tree(&g, 0, &SimConfig::for_graph(&g)).unwrap();
        assert_eq!(t.parent[3], Some(1));
    }

    #[test]
    fn sum_and_argmin() {
        let path = graph(GraphKind::Path { n: 4 });
        let config = SimConfig::for_graph(&path);
        let (t, _) = bfs_tree(&path, 0, &config).unwrap();
        let ones = vec![vec![1u128]; 4];
        let (agg, _) = tree_aggregate(&path, &t, &ones, AggregateOp::Sum, 1, &config).unwrap();
        assert_eq!(agg.items, vec![4]);
        assert!(agg.learned.iter().all(|l| l.as_deref() == Some(&[4][..])));

        let mut vals = vec![vec![0u128; 3]; 4];
        vals[2] = vec![5, 2, 9];
        let (agg, _) = tree_aggregate(&path, &t, &vals, AggregateOp::ArgMin, 1, &config).unwrap();
        assert_eq!(agg.argmin, Some(2));
        assert!(agg.learned.iter().all(|l| l.as_deref() == Some(&[2][..])));
    }

    #[test]
    fn pipelined_upcast_within_depth_plus_items() {
        let path = graph(GraphKind::Path { n: 9 });
        let config = SimConfig::for_graph(&path);
        let (t, _) = bfs_tree(&path, 0, &config).unwrap();
        let k = 12;
        let vals: Vec<Vec<u128>> = (0..9).map(|v| (0..k).map(|i| (v * i) as u128 % 7).collect()).collect();
        let (agg, stats) = tree_aggregate(&path, &t, &vals, AggregateOp::Min, 1, &config).unwrap();
        let depth = t.height() as u64;
        assert!(agg.upcast_rounds <= depth + k as u64);
        assert!(stats.rounds <= 2 * (depth + k as u64));
        assert_eq!(agg.items, vec![0; k]);
    }

    #[test]
    fn wide_items_violate_budget() {
        let path = graph(GraphKind::Path { n: 4 });
        let config = SimConfig::for_graph(&path);
        let (t, _) = bfs_tree(&path, 0, &config).unwrap();
        let vals = vec![vec![u128::MAX]; 4];
        let err = tree_aggregate(&path, &t, &vals, AggregateOp::Sum, 1, &config).unwrap_err();
        assert!(err.is_violation());
    }
}
