//! Covers of subdivided graphs: normalization to `k` inner nodes plus an
//! endpoint per path, and the cover of the original graph it induces.

use crate::error::{input, invariant, Result};
use crate::graph::{CoverSolution, Subdivision, WeightedGraph};

fn check_shape(h: &WeightedGraph, sub: &Subdivision) -> Result<()> {
    if h.n() != sub.original_nodes + 2 * sub.k * sub.paths.len() {
        return input("subdivision mapping does not match the graph");
    }
    Ok(())
}

/// Whether every path has exactly `k` inner nodes and an endpoint in `cover`.
pub fn is_normalized(sub: &Subdivision, cover: &CoverSolution) -> bool {
    let mut member = vec![false; sub.original_nodes + 2 * sub.k * sub.paths.len()];
    for &v in cover.nodes() {
        if v < member.len() {
            member[v] = true;
        }
    }
    sub.paths.iter().all(|p| {
        let inner = p.inner.iter().filter(|&&x| member[x]).count();
        inner == sub.k && (member[p.endpoints.0] || member[p.endpoints.1])
    })
}

/// Rewrites a cover of the subdivided graph so that each path holds exactly
/// `k` inner nodes and at least one endpoint, without growing it.
///
/// Original nodes in the cover are kept. A path missing both endpoints
/// gains its smaller-id endpoint; it then held at least `k + 1` inner
/// nodes. Paths already in normal form are left untouched; others get the
/// alternate inner nodes away from a chosen endpoint.
pub fn normalize_cover(h: &WeightedGraph, sub: &Subdivision, cover: &CoverSolution) -> Result<CoverSolution> {
    check_shape(h, sub)?;
    if let Some(e) = cover.uncovered_edge(h) {
        let (u, v) = h.endpoints(e);
        return invariant(format!("input misses edge ({u}, {v})"));
    }
    let mut member = vec![false; h.n()];
    for &v in cover.nodes() {
        member[v] = true;
    }
    let k = sub.k;
    for p in &sub.paths {
        let (a, b) = p.endpoints;
        let inner = p.inner.iter().filter(|&&x| member[x]).count();
        if inner == k && (member[a] || member[b]) {
            continue;
        }
        if !member[a] && !member[b] {
            member[a.min(b)] = true;
        }
        for &x in &p.inner {
            member[x] = false;
        }
        // From v_0 take v_2, v_4, .., v_2k; from v_2k+1 take v_1, v_3, .., v_2k-1.
        let offset = if member[a] { 1 } else { 0 };
        for j in 0..k {
            member[p.inner[2 * j + offset]] = true;
        }
    }
    let out = CoverSolution::new(h, (0..h.n()).filter(|&v| member[v]).collect())?;
    if out.len() > cover.len() {
        return invariant(format!("normalization grew the cover from {} to {}", cover.len(), out.len()));
    }
    if let Some(e) = out.uncovered_edge(h) {
        return invariant(format!("normalized cover misses edge {e}"));
    }
    if !is_normalized(sub, &out) {
        return invariant("normalized cover is not in normal form");
    }
    Ok(out)
}

/// The original nodes of a normalized cover, checked to cover `g` with
/// size `|cover| − k·|E(g)|`.
pub fn induced_cover(
    g: &WeightedGraph,
    h: &WeightedGraph,
    sub: &Subdivision,
    cover: &CoverSolution,
) -> Result<CoverSolution> {
    check_shape(h, sub)?;
    if sub.original_nodes != g.n() || sub.paths.len() != g.m() {
        return input("subdivision mapping does not match the original graph");
    }
    if !is_normalized(sub, cover) {
        return input("cover is not normalized");
    }
    let nodes: Vec<usize> = cover.nodes().iter().copied().filter(|&v| v < g.n()).collect();
    let induced = CoverSolution::new(g, nodes)?;
    if let Some(e) = induced.uncovered_edge(g) {
        return invariant(format!("induced set misses edge {e}"));
    }
    if induced.len() + sub.k * g.m() != cover.len() {
        return invariant(format!(
            "size identity fails: {} + {}·{} ≠ {}",
            induced.len(),
            sub.k,
            g.m(),
            cover.len()
        ));
    }
    Ok(induced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::subdivide_edges;
    use crate::oracle::exact_mwvc;

    #[test]
    fn inner_pair_becomes_endpoint_and_one_inner() {
        let g = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        let (h, sub) = subdivide_edges(&g, 1).unwrap();
        let s = CoverSolution::new(&h, vec![2, 3]).unwrap();
        let out = normalize_cover(&h, &sub, &s).unwrap();
        assert_eq!(out.nodes(), &[0, 3]);
        assert_eq!(normalize_cover(&h, &sub, &out).unwrap(), out);
    }

    #[test]
    fn single_edge_identity() {
        let g = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        let (h, sub) = subdivide_edges(&g, 2).unwrap();
        let opt = exact_mwvc(&h).unwrap();
        assert_eq!(opt.len(), 3);
        let norm = normalize_cover(&h, &sub, &opt).unwrap();
        assert_eq!(induced_cover(&g, &h, &sub, &norm).unwrap().len(), 1);
    }

    #[test]
    fn triangle_identity() {
        let g = WeightedGraph::unit(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let (h, sub) = subdivide_edges(&g, 1).unwrap();
        assert_eq!(h.n(), 9);
        let opt = exact_mwvc(&h).unwrap();
        assert_eq!(opt.len(), 5);
        let norm = normalize_cover(&h, &sub, &opt).unwrap();
        assert_eq!(induced_cover(&g, &h, &sub, &norm).unwrap().len(), 2);
    }

    #[test]
    fn edgeless_graph() {
        let g = WeightedGraph::unit(3, vec![]).unwrap();
        let (h, sub) = subdivide_edges(&g, 2).unwrap();
        let empty = CoverSolution::new(&h, vec![]).unwrap();
        assert!(induced_cover(&g, &h, &sub, &empty).unwrap().nodes().is_empty());
    }

    #[test]
    fn non_cover_rejected() {
        let g = WeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        let (h, sub) = subdivide_edges(&g, 1).unwrap();
        let s = CoverSolution::new(&h, vec![2]).unwrap();
        assert!(normalize_cover(&h, &sub, &s).is_err());
    }
}
