//! Greedy weighted set cover over the augmenting paths of one length, and
//! the conversion that removes the chosen slacks and edge values.

use num_bigint::BigUint;
use num_traits::Zero;

use super::layers::{build_layers, count_paths, shortest_augmenting_length};
use crate::error::{input, invariant, Result};
use crate::fractional::FractionalAssignment;
use crate::graph::WeightedGraph;

/// Nodes whose slack and edges whose value are given up in one stage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EliminationSelection {
    /// Positive-slack nodes, sorted.
    pub nodes: Vec<usize>,
    /// Positive-value edges, sorted.
    pub edges: Vec<usize>,
    /// Numerator of `s(X)` at selection time.
    pub slack_cost: i128,
    /// Numerator of `y(F)` at selection time.
    pub value_cost: i128,
    /// Greedy phases run.
    pub phases: u32,
}

impl EliminationSelection {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    /// Numerator of `s(X) + y(F)`.
    pub fn cost(&self) -> i128 {
        self.slack_cost + self.value_cost
    }
}

fn to_big(x: i128) -> BigUint {
    BigUint::from(x.max(0) as u128)
}

/// Covers every augmenting path of length `d` by positive-slack endpoints
/// and positive-value even edges, then applies [`convert`] to `a`.
///
/// Phase `i` takes every set whose efficiency (active paths per unit of
/// weight) is at least `2^{-i}·Δ^d / w_min`, going over level 0, then the
/// odd levels in order, recounting paths before each level. The last phase
/// threshold is at most `1/w_max`, so every remaining path is covered.
pub fn eliminate_stage(
    g: &WeightedGraph,
    side: &[bool],
    a: &mut FractionalAssignment,
    d: usize,
) -> Result<EliminationSelection> {
    if d == 0 || d % 2 == 0 {
        return input(format!("stage length {d} must be odd and at least 1"));
    }
    match shortest_augmenting_length(g, side, a)? {
        Some(len) if len < d => {
            return invariant(format!(
                "augmenting path of length {len} remains before stage {d}"
            ));
        }
        Some(len) if len == d => {}
        _ => return Ok(EliminationSelection::default()),
    }
    let mut layered = build_layers(g, side, a, d)?;
    let slack = a.slack_nums(g);
    let counts = count_paths(&layered);
    if counts.total.is_zero() {
        return Ok(EliminationSelection::default());
    }

    // Weights of the sets in the instance: endpoints and even edges on some path.
    let mut weights = Vec::new();
    for &level in &[0, d] {
        for &v in &layered.layers[level] {
            if !counts.node[v].is_zero() {
                weights.push(slack[v]);
            }
        }
    }
    for level in (1..d).step_by(2) {
        for (j, &(e, _, _)) in layered.links[level].iter().enumerate() {
            if !counts.link[level][j].is_zero() {
                weights.push(a.y_num(e));
            }
        }
    }
    let w_min = *weights.iter().min().unwrap_or(&1);
    let w_max = *weights.iter().max().unwrap_or(&1);
    if w_min <= 0 {
        return invariant("a candidate set has non-positive weight");
    }
    let reach = BigUint::from(g.max_degree().max(1) as u64).pow(d as u32);
    let w_min_big = to_big(w_min);
    // Smallest P >= 1 with 2^P·w_min >= Δ^d·w_max.
    let target = &reach * to_big(w_max);
    let mut phases = 1u32;
    while (&w_min_big << phases as usize) < target {
        phases += 1;
    }

    let mut selection = EliminationSelection::default();
    let levels: Vec<usize> = std::iter::once(0).chain((1..=d).step_by(2)).collect();
    let mut counts = counts;
    let mut dirty = false;
    for i in 1..=phases {
        let scale = &w_min_big << i as usize;
        for &level in &levels {
            if dirty {
                counts = count_paths(&layered);
                dirty = false;
            }
            if counts.total.is_zero() {
                break;
            }
            // Efficiency count/weight >= 2^{-i}·Δ^d/w_min.
            let qualifies = |count: &BigUint, weight: i128| -> bool {
                !count.is_zero() && count * &scale >= &reach * to_big(weight)
            };
            if level == 0 || level == d {
                for idx in 0..layered.layers[level].len() {
                    let v = layered.layers[level][idx];
                    if layered.active_node[v] && qualifies(&counts.node[v], slack[v]) {
                        selection.nodes.push(v);
                        selection.slack_cost += slack[v];
                        layered.deactivate_node(v);
                        dirty = true;
                    }
                }
            }
            if level % 2 == 1 && level < d {
                for j in 0..layered.links[level].len() {
                    let e = layered.links[level][j].0;
                    if layered.active_link[level][j] && qualifies(&counts.link[level][j], a.y_num(e)) {
                        selection.edges.push(e);
                        selection.value_cost += a.y_num(e);
                        layered.deactivate_link(level, j);
                        dirty = true;
                    }
                }
            }
        }
    }
    if dirty {
        counts = count_paths(&layered);
    }
    if !counts.total.is_zero() {
        return invariant(format!("stage {d} left {} active paths", counts.total));
    }
    selection.nodes.sort_unstable();
    selection.edges.sort_unstable();
    selection.phases = phases;
    *a = convert(g, a, &selection.nodes, &selection.edges)?;
    debug_assert!(shortest_augmenting_length(g, side, a)?.map_or(true, |len| len > d));
    Ok(selection)
}

/// Sets `y_e = 0` on `edges` and lowers capacities: each `v ∈ nodes` loses
/// its slack and each endpoint of an edge in `edges` loses that edge's value.
pub fn convert(
    g: &WeightedGraph,
    a: &FractionalAssignment,
    nodes: &[usize],
    edges: &[usize],
) -> Result<FractionalAssignment> {
    a.check(g)?;
    let slack = a.slack_nums(g);
    let mut capacity = a.capacities().to_vec();
    let mut y = a.y_nums().to_vec();
    let mut seen = vec![false; g.n()];
    for &v in nodes {
        g.check_node(v)?;
        if slack[v] <= 0 {
            return invariant(format!("node {v} has no slack to give up"));
        }
        if std::mem::replace(&mut seen[v], true) {
            return input(format!("node {v} listed twice"));
        }
        capacity[v] -= slack[v];
    }
    let mut used = vec![false; g.m()];
    for &e in edges {
        if e >= g.m() {
            return input(format!("edge {e} out of range"));
        }
        if y[e] <= 0 {
            return invariant(format!("edge {e} has no value to give up"));
        }
        if std::mem::replace(&mut used[e], true) {
            return input(format!("edge {e} listed twice"));
        }
        let (u, v) = g.endpoints(e);
        capacity[u] -= y[e];
        capacity[v] -= y[e];
        y[e] = 0;
    }
    FractionalAssignment::with_capacities(g, a.denominator(), capacity, y)
}
