//! Near-optimal fractional w-matchings by shortest-augmenting-path phases,
//! with a cover certificate bounding the optimum, and the reduction from
//! node weights to unit weights.

use std::collections::VecDeque;

use super::{product_le, quantum, FractionalAssignment, PARAM_SCALE};
use crate::bipartite::{extract_cover, shortest_augmenting_length};
use crate::error::{input, Error, Result};
use crate::graph::{double_cover, WeightedGraph};

/// Output of [`approx_w_matching`].
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxMatching {
    pub assignment: FractionalAssignment,
    /// Numerator, over the assignment's denominator, of an upper bound on
    /// the optimal value: the weight of a cover, halved for general graphs.
    pub certificate: i128,
    /// Augmentation phases run.
    pub phases: u32,
    /// No augmenting path is left, so the assignment is optimal.
    pub exact: bool,
}

impl ApproxMatching {
    /// `y(E) / certificate`, or 1 when both are zero.
    pub fn certified_ratio(&self) -> super::Rational {
        if self.certificate == 0 {
            return super::Rational::from_integer(1);
        }
        super::Rational::new(self.assignment.total_num(), self.certificate)
    }
}

fn delta_numerator(delta: f64) -> Result<i128> {
    if !(0.0..=1.0).contains(&delta) {
        return input(format!("δ must lie in [0, 1], got {delta}"));
    }
    Ok((delta * PARAM_SCALE as f64).floor() as i128)
}

/// Fractional w-matching with `y(E) ≥ (1 − δ)·y*(E)`; `δ = 0` asks for the
/// optimum.
///
/// Bipartite graphs use their BFS 2-coloring. Other graphs are solved on
/// the double cover and projected back by averaging the two copies of each
/// edge, over twice the denominator.
pub fn approx_w_matching(g: &WeightedGraph, delta: f64) -> Result<ApproxMatching> {
    if let Some(side) = g.two_coloring() {
        return approx_w_matching_bipartite(g, &side, delta);
    }
    let cover = double_cover(g)?;
    let side: Vec<bool> = (0..cover.n()).map(|v| v % 2 == 1).collect();
    let q = quantum(g.n(), delta);
    let inner = solve(&cover, &side, delta, q)?;
    let y: Vec<i128> = (0..g.m())
        .map(|e| inner.assignment.y_num(2 * e) + inner.assignment.y_num(2 * e + 1))
        .collect();
    let assignment = FractionalAssignment::from_numerators(g, 2 * q, y)?;
    Ok(ApproxMatching {
        assignment,
        certificate: inner.certificate,
        phases: inner.phases,
        exact: inner.exact,
    })
}

/// [`approx_w_matching`] with a given bipartition (`false` is side A).
pub fn approx_w_matching_bipartite(
    g: &WeightedGraph,
    side: &[bool],
    delta: f64,
) -> Result<ApproxMatching> {
    solve(g, side, delta, quantum(g.n(), delta))
}

fn solve(g: &WeightedGraph, side: &[bool], delta: f64, q: i128) -> Result<ApproxMatching> {
    let delta_num = delta_numerator(delta)?;
    let mut a = FractionalAssignment::zero(g, q)?;
    if side.len() != g.n() || g.edges().iter().any(|&(u, v)| side[u] == side[v]) {
        return input("side assignment is not a bipartition");
    }
    let mut net = Network::new(g, side, &a);
    let mut phases = 0u32;
    loop {
        if !net.levels() {
            let (cover, _) = extract_cover(g, side, &a, g.n().max(1))?;
            return Ok(ApproxMatching {
                certificate: a.capacity_of(cover.nodes()),
                assignment: a,
                phases,
                exact: true,
            });
        }
        net.blocking_flow();
        phases += 1;
        a = net.assignment(g, q)?;
        let Some(len) = shortest_augmenting_length(g, side, &a)? else {
            continue;
        };
        let (cover, _) = extract_cover(g, side, &a, (len - 1) / 2)?;
        let bound = a.capacity_of(cover.nodes());
        if product_le(PARAM_SCALE - delta_num, bound, PARAM_SCALE, a.total_num()) {
            return Ok(ApproxMatching {
                assignment: a,
                certificate: bound,
                phases,
                exact: false,
            });
        }
    }
}

/// Flow network `source → A → B → sink` with node capacities on the
/// source and sink arcs and unbounded middle arcs, one per edge.
struct Network {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i128>,
    /// Arc index of each graph edge's middle arc.
    edge_arc: Vec<usize>,
    level: Vec<usize>,
    next_arc: Vec<usize>,
    source: usize,
    sink: usize,
}

impl Network {
    fn new(g: &WeightedGraph, side: &[bool], a: &FractionalAssignment) -> Self {
        let n = g.n();
        let mut net = Network {
            head: vec![Vec::new(); n + 2],
            to: Vec::new(),
            cap: Vec::new(),
            edge_arc: Vec::with_capacity(g.m()),
            level: vec![usize::MAX; n + 2],
            next_arc: vec![0; n + 2],
            source: n,
            sink: n + 1,
        };
        let unbounded = a.capacities().iter().sum::<i128>() + 1;
        for v in 0..n {
            if side[v] {
                net.add(v, net.sink, a.capacity_num(v));
            } else {
                net.add(net.source, v, a.capacity_num(v));
            }
        }
        for &(u, v) in g.edges() {
            let (x, z) = if side[u] { (v, u) } else { (u, v) };
            let arc = net.add(x, z, unbounded);
            net.edge_arc.push(arc);
        }
        net
    }

    fn add(&mut self, from: usize, to: usize, cap: i128) -> usize {
        let arc = self.to.len();
        self.head[from].push(arc);
        self.to.push(to);
        self.cap.push(cap);
        self.head[to].push(arc + 1);
        self.to.push(from);
        self.cap.push(0);
        arc
    }

    /// BFS levels over residual arcs; true when the sink is reachable.
    fn levels(&mut self) -> bool {
        self.level.fill(usize::MAX);
        self.level[self.source] = 0;
        let mut queue = VecDeque::from([self.source]);
        while let Some(v) = queue.pop_front() {
            for &arc in &self.head[v] {
                let u = self.to[arc];
                if self.cap[arc] > 0 && self.level[u] == usize::MAX {
                    self.level[u] = self.level[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        self.level[self.sink] != usize::MAX
    }

    fn blocking_flow(&mut self) {
        self.next_arc.fill(0);
        while self.push(self.source, i128::MAX) > 0 {}
    }

    fn push(&mut self, v: usize, limit: i128) -> i128 {
        if v == self.sink {
            return limit;
        }
        while self.next_arc[v] < self.head[v].len() {
            let arc = self.head[v][self.next_arc[v]];
            let u = self.to[arc];
            if self.cap[arc] > 0 && self.level[u] == self.level[v] + 1 {
                let pushed = self.push(u, limit.min(self.cap[arc]));
                if pushed > 0 {
                    self.cap[arc] -= pushed;
                    self.cap[arc ^ 1] += pushed;
                    return pushed;
                }
            }
            self.next_arc[v] += 1;
        }
        0
    }

    fn assignment(&self, g: &WeightedGraph, q: i128) -> Result<FractionalAssignment> {
        let y = self.edge_arc.iter().map(|&arc| self.cap[arc ^ 1]).collect();
        FractionalAssignment::from_numerators(g, q, y)
    }
}

/// Unit-weight graph with `w(v)` copies of each node and all copy pairs of
/// adjacent nodes joined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitExpansion {
    pub graph: WeightedGraph,
    /// Original node of each copy.
    pub owner: Vec<usize>,
    /// Original edge of each expanded edge.
    pub origin: Vec<usize>,
}

impl UnitExpansion {
    /// Sums expanded edge values onto their original edges.
    pub fn project(&self, g: &WeightedGraph, a: &FractionalAssignment) -> Result<FractionalAssignment> {
        if a.y_nums().len() != self.origin.len() {
            return input("assignment does not match the expansion");
        }
        let mut y = vec![0i128; g.m()];
        for (e, &orig) in self.origin.iter().enumerate() {
            y[orig] += a.y_num(e);
        }
        FractionalAssignment::from_numerators(g, a.denominator(), y)
    }

    /// Spreads each original value evenly over the `w(u)·w(v)` copy pairs;
    /// the denominator grows by the product of those pair counts' lcm.
    pub fn lift(&self, g: &WeightedGraph, a: &FractionalAssignment) -> Result<FractionalAssignment> {
        let pairs = |e: usize| {
            let (u, v) = g.endpoints(e);
            i128::from(g.node_weight(u)) * i128::from(g.node_weight(v))
        };
        let mut scale = 1i128;
        for e in 0..g.m() {
            scale = lcm(scale, pairs(e))
                .filter(|&s| s.checked_mul(a.denominator()).is_some())
                .ok_or_else(|| Error::Input("lifted denominator overflows".into()))?;
        }
        let y = self
            .origin
            .iter()
            .map(|&orig| a.y_num(orig) * (scale / pairs(orig)))
            .collect();
        FractionalAssignment::from_numerators(&self.graph, a.denominator() * scale, y)
    }
}

fn lcm(a: i128, b: i128) -> Option<i128> {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    (a / x).checked_mul(b)
}

/// Expansion of a node-weighted graph, limited to `max_nodes` copies.
pub fn unit_expansion(g: &WeightedGraph, max_nodes: usize) -> Result<UnitExpansion> {
    let weights = g.require_node_weights("unit expansion")?;
    let total: u128 = weights.iter().map(|&w| u128::from(w)).sum();
    if total > max_nodes as u128 {
        return Err(Error::SizeCap(format!(
            "expansion has {total} nodes, limit is {max_nodes}"
        )));
    }
    let mut first = Vec::with_capacity(g.n());
    let mut owner = Vec::with_capacity(total as usize);
    for (v, &w) in weights.iter().enumerate() {
        first.push(owner.len());
        owner.extend(std::iter::repeat_n(v, w as usize));
    }
    let mut edges = Vec::new();
    let mut origin = Vec::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        for i in 0..weights[u] as usize {
            for j in 0..weights[v] as usize {
                edges.push((first[u] + i, first[v] + j));
                origin.push(e);
            }
        }
    }
    let graph = WeightedGraph::unit(owner.len(), edges)?;
    Ok(UnitExpansion {
        graph,
        owner,
        origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_fractional_value;
    use num_rational::Ratio;

    #[test]
    fn single_edge_is_capacity_bound() {
        let g = WeightedGraph::node_weighted(2, vec![(0, 1)], vec![1, 2]).unwrap();
        for delta in [0.0, 0.5, 1.0] {
            let r = approx_w_matching(&g, delta).unwrap();
            assert_eq!(r.assignment.y(0), Ratio::from_integer(1));
        }
    }

    #[test]
    fn unit_path_reaches_optimum() {
        let g = WeightedGraph::unit(3, vec![(0, 1), (1, 2)]).unwrap();
        let r = approx_w_matching(&g, 0.01).unwrap();
        assert!(r.assignment.total() >= Ratio::new(99, 100));
        assert!(r.assignment.total() <= Ratio::from_integer(1));
    }

    #[test]
    fn triangle_goes_through_double_cover() {
        let g = WeightedGraph::unit(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = approx_w_matching(&g, 0.0).unwrap();
        assert!(r.exact);
        assert_eq!(r.assignment.total(), exact_fractional_value(&g).unwrap());
        assert!(r.assignment.is_feasible(&g));
    }

    #[test]
    fn certificate_bounds_the_optimum() {
        let g = WeightedGraph::node_weighted(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)], vec![3, 1, 4, 2])
            .unwrap();
        let r = approx_w_matching(&g, 0.3).unwrap();
        let opt = exact_fractional_value(&g).unwrap();
        let q = r.assignment.denominator();
        assert!(Ratio::new(r.certificate, q) >= opt);
        assert!(r.assignment.total() * 10 >= opt * 7);
    }

    #[test]
    fn rejects_bad_delta() {
        let g = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        assert!(approx_w_matching(&g, 1.5).is_err());
        assert!(approx_w_matching(&g, f64::NAN).is_err());
    }

    #[test]
    fn expansion_preserves_value() {
        let g = WeightedGraph::node_weighted(3, vec![(0, 1), (1, 2)], vec![2, 3, 1]).unwrap();
        let x = unit_expansion(&g, 64).unwrap();
        assert_eq!(x.graph.n(), 6);
        assert_eq!(x.graph.m(), 2 * 3 + 3);
        assert_eq!(exact_fractional_value(&x.graph).unwrap(), exact_fractional_value(&g).unwrap());
        let best = approx_w_matching(&g, 0.0).unwrap().assignment;
        let lifted = x.lift(&g, &best).unwrap();
        assert_eq!(lifted.total(), best.total());
        assert_eq!(x.project(&g, &lifted).unwrap().total(), best.total());
        assert!(unit_expansion(&g, 5).is_err());
    }
}
