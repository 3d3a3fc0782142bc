use crate::error::{input, Result};
use crate::graph::WeightedGraph;

/// Node values `x_v ≥ 0` with `x_u + x_v ≥ w(e)` on every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCover {
    x: Vec<u64>,
}

impl DualCover {
    pub fn x(&self, v: usize) -> u64 {
        self.x[v]
    }

    pub fn values(&self) -> &[u64] {
        &self.x
    }

    pub fn total(&self) -> u128 {
        self.x.iter().map(|&x| u128::from(x)).sum()
    }

    /// Every edge is covered by its endpoint values.
    pub fn is_feasible(&self, g: &WeightedGraph) -> bool {
        self.x.len() == g.n()
            && g.edges().iter().enumerate().all(|(e, &(u, v))| {
                u128::from(self.x[u]) + u128::from(self.x[v]) >= u128::from(g.edge_weight(e))
            })
    }
}

/// Sequential local ratio in edge order: each edge's residual
/// `w(e) − x_u − x_v`, when positive, is added to both endpoints.
/// The total is at most twice the maximum matching weight.
pub fn local_ratio_dual_cover(g: &WeightedGraph) -> Result<DualCover> {
    if !g.mode().has_edge_weights() {
        return input("dual cover needs edge weights");
    }
    let mut x = vec![0u64; g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let covered = u128::from(x[u]) + u128::from(x[v]);
        let w = u128::from(g.edge_weight(e));
        if w > covered {
            let r = (w - covered) as u64;
            x[u] += r;
            x[v] += r;
        }
    }
    Ok(DualCover { x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = WeightedGraph::edge_weighted(2, vec![(0, 1, 6)]).unwrap();
        let d = local_ratio_dual_cover(&g).unwrap();
        assert_eq!(d.values(), &[6, 6]);
        assert_eq!(d.total(), 12);
    }

    #[test]
    fn edgeless_graph() {
        let g = WeightedGraph::edge_weighted(3, vec![]).unwrap();
        assert_eq!(local_ratio_dual_cover(&g).unwrap().total(), 0);
    }

    #[test]
    fn triangle_within_twice_fractional_optimum() {
        let g = WeightedGraph::edge_weighted(3, vec![(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let d = local_ratio_dual_cover(&g).unwrap();
        assert!(d.is_feasible(&g));
        assert!(d.total() <= 3);
    }

    #[test]
    fn needs_edge_weights() {
        let g = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        assert!(local_ratio_dual_cover(&g).is_err());
    }
}
