//! Exact reference solvers for small instances.
//!
//! Every solver has a hard size cap and fails with [`Error::SizeCap`]
//! instead of degrading to an approximation.

use std::collections::VecDeque;

use num_rational::Ratio;

use crate::error::{input, Error, Result};
use crate::fractional::{FractionalAssignment, Rational};
use crate::graph::{double_cover, CoverSolution, Matching, WeightedGraph};

/// Node cap of [`exact_mwvc`].
pub const MWVC_MAX_NODES: usize = 24;
/// Edge cap of the exhaustive matching search.
pub const MWM_MAX_EDGES: usize = 26;
/// Node cap of the subset dynamic program for matchings.
pub const MWM_MAX_DP_NODES: usize = 20;
/// Node cap of [`enumerate_augmenting_paths`].
pub const PATHS_MAX_NODES: usize = 14;

fn too_large<T>(msg: String) -> Result<T> {
    Err(Error::SizeCap(msg))
}

/// Minimum weight vertex cover by branch and bound, `n ≤ 24`.
pub fn exact_mwvc(g: &WeightedGraph) -> Result<CoverSolution> {
    exact_mwvc_capped(g, MWVC_MAX_NODES)
}

/// [`exact_mwvc`] with a caller-chosen node cap.
///
/// The search prunes with a local-ratio lower bound and applies the
/// degree-0 and degree-1 reductions, so sparse graphs far above the default
/// cap (subdivided gadgets, for instance) stay cheap.
pub fn exact_mwvc_capped(g: &WeightedGraph, max_nodes: usize) -> Result<CoverSolution> {
    if g.n() > max_nodes {
        return too_large(format!("exact cover limited to {max_nodes} nodes, got {}", g.n()));
    }
    let weights: Vec<u64> = (0..g.n()).map(|v| g.node_weight(v)).collect();
    let mut search = CoverSearch {
        g,
        w: weights,
        alive: vec![true; g.n()],
        deg: (0..g.n()).map(|v| g.degree(v)).collect(),
        removed: Vec::new(),
        chosen: Vec::new(),
        cost: 0,
        best: u64::MAX,
        best_set: Vec::new(),
    };
    search.run();
    let cover = CoverSolution::new(g, search.best_set)?;
    debug_assert!(cover.is_cover(g));
    Ok(cover)
}

struct CoverSearch<'a> {
    g: &'a WeightedGraph,
    w: Vec<u64>,
    alive: Vec<bool>,
    deg: Vec<usize>,
    removed: Vec<usize>,
    chosen: Vec<usize>,
    cost: u64,
    best: u64,
    best_set: Vec<usize>,
}

impl CoverSearch<'_> {
    fn remove(&mut self, v: usize) {
        self.alive[v] = false;
        for &(u, _) in self.g.neighbors(v) {
            if self.alive[u] {
                self.deg[u] -= 1;
            }
        }
        self.removed.push(v);
    }

    fn take(&mut self, v: usize) {
        self.cost += self.w[v];
        self.chosen.push(v);
        self.remove(v);
    }

    fn undo(&mut self, removed_mark: usize, chosen_mark: usize) {
        while self.removed.len() > removed_mark {
            let v = self.removed.pop().unwrap();
            for &(u, _) in self.g.neighbors(v) {
                if self.alive[u] {
                    self.deg[u] += 1;
                }
            }
            self.alive[v] = true;
        }
        while self.chosen.len() > chosen_mark {
            let v = self.chosen.pop().unwrap();
            self.cost -= self.w[v];
        }
    }

    fn alive_neighbors(&self, v: usize) -> Vec<usize> {
        self.g
            .neighbors(v)
            .iter()
            .map(|&(u, _)| u)
            .filter(|&u| self.alive[u])
            .collect()
    }

    /// Local-ratio fractional matching value on the live graph: a lower bound.
    fn lower_bound(&self) -> u64 {
        let mut residual = self.w.clone();
        let mut bound = 0;
        for (u, v) in self.g.edges().iter().copied() {
            if self.alive[u] && self.alive[v] {
                let r = residual[u].min(residual[v]);
                residual[u] -= r;
                residual[v] -= r;
                bound += r;
            }
        }
        bound
    }

    fn reduce(&mut self) {
        loop {
            let mut changed = false;
            for v in 0..self.g.n() {
                if !self.alive[v] {
                    continue;
                }
                match self.deg[v] {
                    0 => {
                        self.remove(v);
                        changed = true;
                    }
                    1 => {
                        let u = self.alive_neighbors(v)[0];
                        if self.w[v] >= self.w[u] {
                            self.take(u);
                            changed = true;
                        }
                    }
                    _ => {}
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn run(&mut self) {
        let (rm, cm) = (self.removed.len(), self.chosen.len());
        self.reduce();
        if self.cost + self.lower_bound() >= self.best {
            self.undo(rm, cm);
            return;
        }
        let pivot = (0..self.g.n())
            .filter(|&v| self.alive[v] && self.deg[v] > 0)
            .max_by_key(|&v| (self.deg[v], std::cmp::Reverse(v)));
        let Some(v) = pivot else {
            self.best = self.cost;
            self.best_set = self.chosen.clone();
            self.undo(rm, cm);
            return;
        };
        let mark = (self.removed.len(), self.chosen.len());
        self.take(v);
        self.run();
        self.undo(mark.0, mark.1);

        for u in self.alive_neighbors(v) {
            self.take(u);
        }
        self.remove(v);
        self.run();
        self.undo(rm, cm);
    }
}

/// Maximum weight matching.
///
/// Bipartite graphs use the Hungarian method; others use a subset dynamic
/// program (`n ≤ 20`) or exhaustive edge search (`|E| ≤ 26`).
pub fn exact_mwm(g: &WeightedGraph) -> Result<Matching> {
    if let Some(side) = g.two_coloring() {
        return Matching::new(g, hungarian(g, &side));
    }
    if g.n() <= MWM_MAX_DP_NODES {
        return Matching::new(g, subset_dp_matching(g));
    }
    if g.m() <= MWM_MAX_EDGES {
        return Matching::new(g, exhaustive_matching(g));
    }
    too_large(format!(
        "exact matching needs a bipartite graph, n <= {MWM_MAX_DP_NODES} or |E| <= {MWM_MAX_EDGES}"
    ))
}

/// Exhaustive search over edge subsets with a remaining-weight bound.
pub fn exhaustive_matching(g: &WeightedGraph) -> Vec<usize> {
    fn go(
        g: &WeightedGraph,
        e: usize,
        used: &mut [bool],
        cur: &mut Vec<usize>,
        cur_w: u64,
        rest: &[u64],
        best: &mut (u64, Vec<usize>),
    ) {
        if cur_w > best.0 || best.1.is_empty() && cur_w == best.0 {
            *best = (cur_w, cur.clone());
        }
        if e == g.m() || cur_w + rest[e] <= best.0 {
            return;
        }
        let (u, v) = g.endpoints(e);
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            cur.push(e);
            go(g, e + 1, used, cur, cur_w + g.edge_weight(e), rest, best);
            cur.pop();
            used[u] = false;
            used[v] = false;
        }
        go(g, e + 1, used, cur, cur_w, rest, best);
    }
    let mut rest = vec![0u64; g.m() + 1];
    for e in (0..g.m()).rev() {
        rest[e] = rest[e + 1] + g.edge_weight(e);
    }
    let mut best = (0, Vec::new());
    go(g, 0, &mut vec![false; g.n()], &mut Vec::new(), 0, &rest, &mut best);
    best.1
}

/// Dynamic program over sets of still-available nodes.
pub fn subset_dp_matching(g: &WeightedGraph) -> Vec<usize> {
    let n = g.n();
    assert!(n <= MWM_MAX_DP_NODES);
    let full = (1usize << n) - 1;
    let mut best = vec![0u64; full + 1];
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut value = best[rest];
        for &(j, e) in g.neighbors(i) {
            if rest & (1 << j) != 0 {
                value = value.max(g.edge_weight(e) + best[rest & !(1 << j)]);
            }
        }
        best[mask] = value;
    }
    let mut edges = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        if best[mask] == best[rest] {
            mask = rest;
            continue;
        }
        let &(j, e) = g
            .neighbors(i)
            .iter()
            .find(|&&(j, e)| {
                rest & (1 << j) != 0 && best[mask] == g.edge_weight(e) + best[rest & !(1 << j)]
            })
            .expect("dynamic program table is consistent");
        edges.push(e);
        mask = rest & !(1 << j);
    }
    edges
}

/// Kuhn–Munkres on the square cost matrix `−w`, padded with zero-weight
/// non-edges; pairs assigned through non-edges are dropped.
fn hungarian(g: &WeightedGraph, side: &[bool]) -> Vec<usize> {
    let left: Vec<usize> = (0..g.n()).filter(|&v| !side[v]).collect();
    let right: Vec<usize> = (0..g.n()).filter(|&v| side[v]).collect();
    let size = left.len().max(right.len());
    if size == 0 || g.m() == 0 {
        return Vec::new();
    }
    let mut col_of = vec![usize::MAX; g.n()];
    for (j, &v) in right.iter().enumerate() {
        col_of[v] = j;
    }
    let mut cost = vec![vec![0i64; size]; size];
    for (i, &u) in left.iter().enumerate() {
        for &(v, e) in g.neighbors(u) {
            cost[i][col_of[v]] = -(g.edge_weight(e) as i64);
        }
    }
    // 1-based potentials formulation; row 0 / column 0 are sentinels.
    let inf = i64::MAX / 4;
    let mut pu = vec![0i64; size + 1];
    let mut pv = vec![0i64; size + 1];
    let mut row_of_col = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=size {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - pu[i0] - pv[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=size {
                if used[j] {
                    pu[row_of_col[j]] += delta;
                    pv[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut edges = Vec::new();
    for j in 1..=size {
        let i = row_of_col[j];
        if i == 0 || i > left.len() || j > right.len() {
            continue;
        }
        if let Some(e) = g.edge_id(left[i - 1], right[j - 1]) {
            edges.push(e);
        }
    }
    edges
}

/// Optimal fractional w-matching value of a bipartite graph via max-flow
/// with node capacities `w(v)`.
pub fn exact_fractional_w_matching(g: &WeightedGraph) -> Result<u128> {
    let weights = g.require_node_weights("fractional matching oracle")?;
    let Some(side) = g.two_coloring() else {
        return input("fractional matching oracle needs a bipartite graph");
    };
    // Nodes: source = n, sink = n + 1.
    let n = g.n();
    let (s, t) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    for v in 0..n {
        if side[v] {
            net.add(v, t, u128::from(weights[v]));
        } else {
            net.add(s, v, u128::from(weights[v]));
        }
    }
    for &(u, v) in g.edges() {
        let (a, b) = if side[u] { (v, u) } else { (u, v) };
        net.add(a, b, u128::from(weights[a].min(weights[b])));
    }
    Ok(net.max_flow(s, t))
}

/// Optimal fractional w-matching value of any graph.
///
/// Non-bipartite graphs go through the double cover, whose optimum is twice
/// the original one.
pub fn exact_fractional_value(g: &WeightedGraph) -> Result<Rational> {
    if g.is_bipartite() {
        return Ok(Ratio::from_integer(exact_fractional_w_matching(g)? as i128));
    }
    let doubled = exact_fractional_w_matching(&double_cover(g)?)?;
    Ok(Ratio::new(doubled as i128, 2))
}

/// Edmonds–Karp max-flow.
struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u128>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        FlowNetwork {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add(&mut self, a: usize, b: usize, c: u128) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u128 {
        let mut flow = 0;
        loop {
            let mut via = vec![usize::MAX; self.head.len()];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                for &arc in &self.head[u] {
                    let v = self.to[arc];
                    if !seen[v] && self.cap[arc] > 0 {
                        seen[v] = true;
                        via[v] = arc;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return flow;
            }
            let mut push = u128::MAX;
            let mut v = t;
            while v != s {
                let arc = via[v];
                push = push.min(self.cap[arc]);
                v = self.to[arc ^ 1];
            }
            let mut v = t;
            while v != s {
                let arc = via[v];
                self.cap[arc] -= push;
                self.cap[arc ^ 1] += push;
                v = self.to[arc ^ 1];
            }
            flow += push;
        }
    }
}

/// All augmenting paths with at most `max_len` edges, as node sequences.
///
/// A path `v_0, .., v_L` (L odd, simple) is augmenting when both ends have
/// positive slack and every even-numbered edge (2nd, 4th, ..) has `y > 0`.
/// Each path is reported once, oriented so that `v_0 < v_L`.
pub fn enumerate_augmenting_paths(
    g: &WeightedGraph,
    a: &FractionalAssignment,
    max_len: usize,
) -> Result<Vec<Vec<usize>>> {
    if g.n() > PATHS_MAX_NODES {
        return too_large(format!(
            "path enumeration limited to {PATHS_MAX_NODES} nodes, got {}",
            g.n()
        ));
    }
    let slack = a.slack_nums(g);
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut on_path = vec![false; g.n()];
    for start in 0..g.n() {
        if slack[start] > 0 {
            path.push(start);
            on_path[start] = true;
            extend(g, a, &slack, max_len, &mut path, &mut on_path, &mut out);
            on_path[start] = false;
            path.pop();
        }
    }
    out.sort();
    Ok(out)
}

fn extend(
    g: &WeightedGraph,
    a: &FractionalAssignment,
    slack: &[i128],
    max_len: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let len = path.len() - 1;
    if len >= max_len {
        return;
    }
    let u = *path.last().unwrap();
    // The next edge is number len + 1; even-numbered edges need y > 0.
    let needs_positive = (len + 1) % 2 == 0;
    for &(v, e) in g.neighbors(u) {
        if on_path[v] || (needs_positive && a.y_num(e) == 0) {
            continue;
        }
        path.push(v);
        on_path[v] = true;
        if (len + 1) % 2 == 1 && slack[v] > 0 && path[0] < v {
            out.push(path.clone());
        }
        extend(g, a, slack, max_len, path, on_path, out);
        on_path[v] = false;
        path.pop();
    }
}
