//! Fractional w-matchings and fractional covers.
//!
//! Values are exact: every `y_e` and every node capacity is an integer
//! numerator over one shared denominator `Q`.

mod approx;
mod doubling;
mod dual;

use num_bigint::BigInt;
use num_rational::Ratio;

use crate::error::{input, invariant, Result};
use crate::graph::WeightedGraph;

pub use approx::{
    approx_w_matching, approx_w_matching_bipartite, unit_expansion, ApproxMatching, UnitExpansion,
};
pub use doubling::{doubling_w_matching, DoublingResult};
pub use dual::{local_ratio_dual_cover, DualCover};

/// Exact rationals used for reporting fractional quantities.
pub type Rational = Ratio<i128>;

/// Default exponent `c_q` in the denominator `Q = n^c_q`.
pub const DEFAULT_DENOMINATOR_EXPONENT: u32 = 4;

/// Denominator `Q = n^4`, with the exponent raised until `δ·Q ≥ n`.
pub fn quantum(n: usize, delta: f64) -> i128 {
    let base = n.max(2) as i128;
    let mut exp = DEFAULT_DENOMINATOR_EXPONENT;
    while delta > 0.0 && delta * (base.pow(exp) as f64) < n as f64 && exp < 12 {
        exp += 1;
    }
    base.pow(exp)
}

/// Fixed-point scale for tolerance parameters such as `ε` and `δ`.
pub const PARAM_SCALE: i128 = 1 << 20;

/// `x·PARAM_SCALE` rounded up.
pub(crate) fn scaled_param(x: f64) -> i128 {
    (x * PARAM_SCALE as f64).ceil() as i128
}

/// `a·b ≤ c·d` without overflow.
pub(crate) fn product_le(a: i128, b: i128, c: i128, d: i128) -> bool {
    BigInt::from(a) * BigInt::from(b) <= BigInt::from(c) * BigInt::from(d)
}

/// Edge values `y_e ≥ 0` with node capacities, all over denominator `Q`.
///
/// Capacities start as the graph's node weights and change only through the
/// weight/value conversion of the bipartite cover algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalAssignment {
    denom: i128,
    capacity: Vec<i128>,
    y: Vec<i128>,
}

impl FractionalAssignment {
    /// All-zero assignment with capacities `w(v)·Q`.
    pub fn zero(g: &WeightedGraph, denom: i128) -> Result<Self> {
        Self::from_numerators(g, denom, vec![0; g.m()])
    }

    /// Assignment with the given numerators over `denom`, capacities from `g`.
    pub fn from_numerators(g: &WeightedGraph, denom: i128, y: Vec<i128>) -> Result<Self> {
        if denom < 1 {
            return input("denominator must be positive");
        }
        let weights = g.require_node_weights("fractional assignment")?;
        let mut capacity = Vec::with_capacity(g.n());
        for &w in weights {
            match i128::from(w).checked_mul(denom) {
                Some(c) => capacity.push(c),
                None => return input("weight times denominator overflows"),
            }
        }
        Self::with_capacities(g, denom, capacity, y)
    }

    /// Assignment with explicit capacities; validates sign and feasibility.
    pub fn with_capacities(
        g: &WeightedGraph,
        denom: i128,
        capacity: Vec<i128>,
        y: Vec<i128>,
    ) -> Result<Self> {
        if capacity.len() != g.n() || y.len() != g.m() {
            return input("assignment does not match the graph");
        }
        if capacity.iter().chain(&y).any(|&x| x < 0) {
            return invariant("negative capacity or edge value");
        }
        let a = FractionalAssignment { denom, capacity, y };
        a.check(g)?;
        Ok(a)
    }

    pub fn denominator(&self) -> i128 {
        self.denom
    }

    pub fn y_num(&self, e: usize) -> i128 {
        self.y[e]
    }

    pub fn y_nums(&self) -> &[i128] {
        &self.y
    }

    pub fn y(&self, e: usize) -> Rational {
        Ratio::new(self.y[e], self.denom)
    }

    pub fn capacity_num(&self, v: usize) -> i128 {
        self.capacity[v]
    }

    pub fn capacities(&self) -> &[i128] {
        &self.capacity
    }

    pub fn capacity(&self, v: usize) -> Rational {
        Ratio::new(self.capacity[v], self.denom)
    }

    /// Numerator of `Σ_{e ∋ v} y_e`.
    pub fn load_num(&self, g: &WeightedGraph, v: usize) -> i128 {
        g.neighbors(v).iter().map(|&(_, e)| self.y[e]).sum()
    }

    /// Numerator of `s(v)`; negative when infeasible.
    pub fn slack_num(&self, g: &WeightedGraph, v: usize) -> i128 {
        self.capacity[v] - self.load_num(g, v)
    }

    /// All slack numerators.
    pub fn slack_nums(&self, g: &WeightedGraph) -> Vec<i128> {
        let mut s = self.capacity.clone();
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            s[u] -= self.y[e];
            s[v] -= self.y[e];
        }
        s
    }

    /// Exact slack `s(v) = w(v) − Σ_{e ∋ v} y_e`.
    pub fn slack(&self, g: &WeightedGraph, v: usize) -> Result<Rational> {
        g.check_node(v)?;
        let s = self.slack_num(g, v);
        if s < 0 {
            return invariant(format!("node {v} is over capacity"));
        }
        Ok(Ratio::new(s, self.denom))
    }

    /// Numerator of `y(E)`.
    pub fn total_num(&self) -> i128 {
        self.y.iter().sum()
    }

    /// `y(E)`.
    pub fn total(&self) -> Rational {
        Ratio::new(self.total_num(), self.denom)
    }

    /// Numerator of the capacity of a node set.
    pub fn capacity_of(&self, nodes: &[usize]) -> i128 {
        nodes.iter().map(|&v| self.capacity[v]).sum()
    }

    /// Checks sizes, signs and `Σ y ≤ capacity` at every node.
    pub fn check(&self, g: &WeightedGraph) -> Result<()> {
        if self.capacity.len() != g.n() || self.y.len() != g.m() {
            return input("assignment does not match the graph");
        }
        if let Some(e) = self.y.iter().position(|&x| x < 0) {
            return invariant(format!("edge {e} has a negative value"));
        }
        for (v, s) in self.slack_nums(g).into_iter().enumerate() {
            if s < 0 {
                return invariant(format!("node {v} is over capacity"));
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, g: &WeightedGraph) -> bool {
        self.check(g).is_ok()
    }

    /// `Σ_{e ∋ v} y_e > w(v)/2`.
    pub fn is_half_tight(&self, g: &WeightedGraph, v: usize) -> bool {
        2 * self.load_num(g, v) > self.capacity[v]
    }

    pub fn half_tight_set(&self, g: &WeightedGraph) -> Vec<usize> {
        (0..g.n()).filter(|&v| self.is_half_tight(g, v)).collect()
    }

    /// Same values over a denominator that is a multiple of the current one.
    pub fn rescaled(&self, denom: i128) -> Result<Self> {
        if denom < 1 || denom % self.denom != 0 {
            return input("new denominator must be a multiple of the old one");
        }
        let f = denom / self.denom;
        let scale = |xs: &[i128]| -> Result<Vec<i128>> {
            xs.iter()
                .map(|&x| {
                    x.checked_mul(f)
                        .ok_or_else(|| crate::Error::Input("rescaling overflows".into()))
                })
                .collect()
        };
        Ok(FractionalAssignment {
            denom,
            capacity: scale(&self.capacity)?,
            y: scale(&self.y)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_examples() {
        let g = WeightedGraph::node_weighted(3, vec![(0, 1)], vec![5, 3, 4]).unwrap();
        let a = FractionalAssignment::from_numerators(&g, 1, vec![3]).unwrap();
        assert_eq!(a.slack(&g, 0).unwrap(), Ratio::from_integer(2));
        assert_eq!(a.slack(&g, 1).unwrap(), Ratio::from_integer(0));
        assert_eq!(a.slack(&g, 2).unwrap(), Ratio::from_integer(4));
        assert!(a.slack(&g, 3).is_err());
    }

    #[test]
    fn infeasible_assignment_is_rejected() {
        let g = WeightedGraph::node_weighted(2, vec![(0, 1)], vec![1, 1]).unwrap();
        assert!(FractionalAssignment::from_numerators(&g, 2, vec![3]).is_err());
        let raw = FractionalAssignment { denom: 1, capacity: vec![1, 1], y: vec![2] };
        assert!(raw.slack(&g, 0).is_err());
    }

    #[test]
    fn half_tight_is_strict() {
        let g = WeightedGraph::node_weighted(2, vec![(0, 1)], vec![2, 4]).unwrap();
        let a = FractionalAssignment::from_numerators(&g, 1, vec![2]).unwrap();
        assert!(a.is_half_tight(&g, 0));
        assert!(!a.is_half_tight(&g, 1));
    }

    #[test]
    fn quantum_grows_for_small_delta() {
        assert_eq!(quantum(10, 0.5), 10_000);
        assert!(quantum(10, 1e-6) >= 10_000_000);
    }
}
