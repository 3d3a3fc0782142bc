//! Cover extraction from a fractional w-matching with no short augmenting
//! paths, by BFS levels and the lightest B level.

use super::layers::shortest_augmenting_length;
use crate::error::{input, invariant, Result};
use crate::fractional::FractionalAssignment;
use crate::graph::{CoverSolution, WeightedGraph};

/// BFS levels `A_0, B_1, A_1, .., B_k, A_k` and the chosen level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDecomposition {
    /// `A_0..A_k`, each sorted.
    pub a_levels: Vec<Vec<usize>>,
    /// `B_1..B_k`, each sorted; `b_levels[i - 1]` is `B_i`.
    pub b_levels: Vec<Vec<usize>>,
    /// Capacity numerators `w(B_i)`, aligned with `b_levels`.
    pub b_weights: Vec<i128>,
    /// Index `i*` in `1..=k` of the lightest B level, ties to the smallest.
    pub i_star: usize,
}

/// Builds the levels from the positive-slack A nodes, picks the lightest
/// B level `i*`, and returns `S = B_1 ∪ .. ∪ B_{i*} ∪ (A \ (A_0 ∪ .. ∪ A_{i*-1}))`.
///
/// Weights are the assignment's capacities. Checks that `S` is a cover and
/// that `k·w(S) ≤ (k+1)·y(E)`.
pub fn extract_cover(
    g: &WeightedGraph,
    side: &[bool],
    a: &FractionalAssignment,
    k: usize,
) -> Result<(CoverSolution, LevelDecomposition)> {
    if k < 1 {
        return input("level count k must be at least 1");
    }
    a.check(g)?;
    if let Some(len) = shortest_augmenting_length(g, side, a)? {
        if len < 2 * k {
            return invariant(format!(
                "augmenting path of length {len} exists, extraction needs none up to {}",
                2 * k - 1
            ));
        }
    }
    let slack = a.slack_nums(g);
    let mut visited = vec![false; g.n()];
    let mut a_levels = Vec::with_capacity(k + 1);
    let mut b_levels = Vec::with_capacity(k);
    let first: Vec<usize> = (0..g.n()).filter(|&v| !side[v] && slack[v] > 0).collect();
    for &v in &first {
        visited[v] = true;
    }
    a_levels.push(first);
    for i in 1..=k {
        let mut b = Vec::new();
        for &u in &a_levels[i - 1] {
            for &(v, _) in g.neighbors(u) {
                if !visited[v] {
                    visited[v] = true;
                    b.push(v);
                }
            }
        }
        b.sort_unstable();
        let mut next = Vec::new();
        for &u in &b {
            for &(v, e) in g.neighbors(u) {
                if a.y_num(e) > 0 && !visited[v] {
                    visited[v] = true;
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        b_levels.push(b);
        a_levels.push(next);
    }
    let b_weights: Vec<i128> = b_levels.iter().map(|b| a.capacity_of(b)).collect();
    let i_star = b_weights
        .iter()
        .enumerate()
        .min_by_key(|&(i, &w)| (w, i))
        .map(|(i, _)| i + 1)
        .unwrap_or(1);

    let mut in_s = vec![false; g.n()];
    for v in 0..g.n() {
        in_s[v] = !side[v];
    }
    for level in &a_levels[..i_star] {
        for &v in level {
            in_s[v] = false;
        }
    }
    for level in &b_levels[..i_star] {
        for &v in level {
            in_s[v] = true;
        }
    }
    let nodes: Vec<usize> = (0..g.n()).filter(|&v| in_s[v]).collect();
    let cover = CoverSolution::new(g, nodes)?;
    if let Some(e) = cover.uncovered_edge(g) {
        return invariant(format!("extracted set misses edge {e}"));
    }
    let weight = a.capacity_of(cover.nodes());
    let k128 = k as i128;
    if k128 * weight > (k128 + 1) * a.total_num() {
        return invariant(format!(
            "extracted cover weight {weight} exceeds (1 + 1/{k}) times {}",
            a.total_num()
        ));
    }
    Ok((
        cover,
        LevelDecomposition {
            a_levels,
            b_levels,
            b_weights,
            i_star,
        },
    ))
}
