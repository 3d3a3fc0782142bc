//! Distributed doubling algorithm for a fractional w-matching whose
//! half-tight nodes form a 4-approximate vertex cover.

use super::FractionalAssignment;
use crate::error::{invariant, Result};
use crate::graph::WeightedGraph;
use crate::sim::{bit_len, run_protocol, NodeContext, NodeProgram, RoundStats, SimConfig};

/// Output of [`doubling_w_matching`].
#[derive(Debug, Clone, PartialEq)]
pub struct DoublingResult {
    /// Values over denominator `max(Δ, 1)`.
    pub assignment: FractionalAssignment,
    /// Nodes with load above half their weight; a vertex cover.
    pub half_tight: Vec<usize>,
    pub stats: RoundStats,
    /// Number of doubling phases scheduled.
    pub phases: u64,
}

struct DoublingNode {
    weight: i128,
    /// `(neighbor, edge id)`.
    neighbors: Vec<(usize, usize)>,
    /// Numerators of incident edge values, aligned with `neighbors`.
    y: Vec<i128>,
    neighbor_weight: Vec<u64>,
    neighbor_tight: Vec<bool>,
    denom: i128,
    chunk_bits: usize,
    chunks: u64,
    last_phase_round: u64,
    sent_tight: Option<bool>,
    done: bool,
}

impl DoublingNode {
    fn tight(&self) -> bool {
        2 * self.y.iter().sum::<i128>() > self.weight * self.denom
    }

    fn settled(&self) -> bool {
        let me = self.tight();
        self.neighbor_tight.iter().all(|&t| me || t)
    }
}

impl NodeProgram for DoublingNode {
    type Msg = u64;
    type Output = (bool, Vec<(usize, i128)>);

    fn send(&mut self, round: u64) -> Vec<(usize, u64)> {
        if round <= self.chunks {
            let shift = (round - 1) as usize * self.chunk_bits;
            let mask = if self.chunk_bits >= 64 {
                u64::MAX
            } else {
                (1u64 << self.chunk_bits) - 1
            };
            let chunk = (self.weight as u64).checked_shr(shift as u32).unwrap_or(0) & mask;
            return self.neighbors.iter().map(|&(u, _)| (u, chunk)).collect();
        }
        let t = self.tight();
        if self.sent_tight == Some(t) {
            return Vec::new();
        }
        self.sent_tight = Some(t);
        self.neighbors.iter().map(|&(u, _)| (u, u64::from(t))).collect()
    }

    fn receive(&mut self, round: u64, inbox: Vec<(usize, u64)>) {
        if round <= self.chunks {
            let shift = (round - 1) as usize * self.chunk_bits;
            for (from, chunk) in inbox {
                if let Ok(i) = self.neighbors.binary_search_by_key(&from, |&(u, _)| u) {
                    self.neighbor_weight[i] |= chunk.checked_shl(shift as u32).unwrap_or(0);
                }
            }
            if round == self.chunks {
                for (i, &w) in self.neighbor_weight.iter().enumerate() {
                    self.y[i] = i128::from(w).min(self.weight);
                }
                self.done = self.neighbors.is_empty();
            }
            return;
        }
        for (from, flag) in inbox {
            if let Ok(i) = self.neighbors.binary_search_by_key(&from, |&(u, _)| u) {
                self.neighbor_tight[i] = flag == 1;
            }
        }
        // Flags describe the state at the start of this round.
        let me = self.sent_tight.unwrap_or(false);
        for (i, &t) in self.neighbor_tight.iter().enumerate() {
            if !me && !t {
                self.y[i] *= 2;
            }
        }
        if round >= self.last_phase_round || (self.settled() && self.sent_tight == Some(self.tight())) {
            self.done = true;
        }
    }

    fn halted(&self) -> bool {
        self.done
    }

    fn output(self) -> (bool, Vec<(usize, i128)>) {
        let tight = self.tight();
        let edges = self.neighbors.iter().map(|&(_, e)| e).zip(self.y).collect();
        (tight, edges)
    }
}

/// Initializes `y_e = min(w(u), w(v))/Δ` and, for `⌈log2(Δ·W)⌉ + 1` phases,
/// doubles every edge with no half-tight endpoint. Nodes first exchange
/// weights in budget-sized chunks; each phase then costs one round of
/// one-bit flags, sent only when a node's flag changes.
pub fn doubling_w_matching(g: &WeightedGraph, config: &SimConfig) -> Result<DoublingResult> {
    let weights = g.require_node_weights("doubling w-matching")?;
    let delta = g.max_degree().max(1) as u128;
    let w = u128::from(g.max_weight());
    let spread = delta * w;
    let phases = if spread <= 1 { 1 } else { bit_len(spread - 1) as u64 + 1 };
    let chunk_bits = config.bit_budget.clamp(1, 64);
    let chunks = bit_len(w).div_ceil(chunk_bits) as u64;
    let denom = delta as i128;
    let (out, stats) = run_protocol(g, config, |ctx: &NodeContext| DoublingNode {
        weight: i128::from(weights[ctx.id]),
        neighbors: ctx.neighbors.clone(),
        y: vec![0; ctx.neighbors.len()],
        neighbor_weight: vec![0; ctx.neighbors.len()],
        neighbor_tight: vec![false; ctx.neighbors.len()],
        denom,
        chunk_bits,
        chunks,
        last_phase_round: chunks + phases,
        sent_tight: None,
        done: ctx.neighbors.is_empty(),
    })?;
    let mut y = vec![None; g.m()];
    let mut half_tight = Vec::new();
    for (v, (tight, edges)) in out.into_iter().enumerate() {
        if tight {
            half_tight.push(v);
        }
        for (e, val) in edges {
            match y[e] {
                None => y[e] = Some(val),
                Some(prev) if prev != val => {
                    return invariant(format!("endpoints disagree on edge {e}"));
                }
                Some(_) => {}
            }
        }
    }
    let y: Vec<i128> = y.into_iter().map(Option::unwrap_or_default).collect();
    let assignment = FractionalAssignment::from_numerators(g, denom, y)?;
    if let Some(e) = (0..g.m()).find(|&e| {
        let (a, b) = g.endpoints(e);
        !assignment.is_half_tight(g, a) && !assignment.is_half_tight(g, b)
    }) {
        return invariant(format!("edge {e} has no half-tight endpoint"));
    }
    Ok(DoublingResult {
        assignment,
        half_tight,
        stats,
        phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_mwvc;
    use num_rational::Ratio;

    fn run(g: &WeightedGraph) -> DoublingResult {
        doubling_w_matching(g, &SimConfig::for_graph(g)).unwrap()
    }

    #[test]
    fn single_edge_is_tight_after_init() {
        let g = WeightedGraph::node_weighted(2, vec![(0, 1)], vec![1, 1]).unwrap();
        let r = run(&g);
        assert_eq!(r.assignment.total(), Ratio::from_integer(1));
        assert_eq!(r.half_tight, vec![0, 1]);
        assert_eq!(g.weight_of(&r.half_tight), 2);
    }

    #[test]
    fn star_center_becomes_tight() {
        let g = WeightedGraph::unit(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = run(&g);
        assert!(r.half_tight.contains(&0));
        assert!(crate::graph::is_cover(&g, &r.half_tight).unwrap());
        let w = Ratio::from_integer(g.weight_of(&r.half_tight) as i128);
        assert!(w <= r.assignment.total() * 4);
    }

    #[test]
    fn four_approximation_on_weighted_paths() {
        let g = WeightedGraph::node_weighted(5, vec![(0, 1), (1, 2), (2, 3), (3, 4)], vec![9, 1, 30, 2, 7])
            .unwrap();
        let r = run(&g);
        let opt = exact_mwvc(&g).unwrap().weight(&g);
        let w = g.weight_of(&r.half_tight);
        assert!(Ratio::from_integer(w as i128) <= r.assignment.total() * 4);
        assert!(w <= 4 * opt);
        assert!(r.stats.within_budget());
    }
}
