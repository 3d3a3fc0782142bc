//! Solution files and their independent re-check.
//!
//! ```text
//! cover               matching            fractional          clusters
//! <node>              <u> <v>             <u> <v> <num>/<den> <node> <node> ..
//! ```
//!
//! The first non-comment line names the kind; `#` starts a comment.

use std::fmt::Write as _;

use distapprox::fractional::{FractionalAssignment, Rational};
use distapprox::graph::{CoverSolution, Matching, WeightedGraph};
use distapprox::sim::Clustering;

use crate::CliError;

/// A parsed solution file, ids unchecked.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionFile {
    Cover(Vec<usize>),
    Matching(Vec<(usize, usize)>),
    Fractional(Vec<(usize, usize, Rational)>),
    Clusters(Vec<Vec<usize>>),
}

pub fn format_cover(cover: &CoverSolution) -> String {
    let mut s = String::from("cover\n");
    for v in cover.nodes() {
        let _ = writeln!(s, "{v}");
    }
    s
}

pub fn format_matching(g: &WeightedGraph, m: &Matching) -> String {
    let mut s = String::from("matching\n");
    for (u, v) in m.pairs(g) {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn format_fractional(g: &WeightedGraph, a: &FractionalAssignment) -> String {
    let mut s = String::from("fractional\n");
    for e in 0..g.m() {
        let y = a.y(e);
        if y != Rational::from_integer(0) {
            let (u, v) = g.endpoints(e);
            let _ = writeln!(s, "{u} {v} {}/{}", y.numer(), y.denom());
        }
    }
    s
}

pub fn format_clusters(c: &Clustering) -> String {
    let mut s = String::from("clusters\n");
    for cluster in &c.clusters {
        let ids: Vec<String> = cluster.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{}", ids.join(" "));
    }
    s
}

fn bad(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Lib(distapprox::Error::Parse { line, message: msg.into() })
}

fn ids(line: usize, toks: &[&str]) -> Result<Vec<usize>, CliError> {
    toks.iter()
        .map(|t| t.parse().map_err(|_| bad(line, format!("bad node id `{t}`"))))
        .collect()
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, CliError> {
    let mut kind: Option<SolutionFile> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match &mut kind {
            None => {
                kind = Some(match toks.as_slice() {
                    ["cover"] => SolutionFile::Cover(Vec::new()),
                    ["matching"] => SolutionFile::Matching(Vec::new()),
                    ["fractional"] => SolutionFile::Fractional(Vec::new()),
                    ["clusters"] => SolutionFile::Clusters(Vec::new()),
                    _ => return Err(bad(line, "expected cover, matching, fractional or clusters")),
                });
            }
            Some(SolutionFile::Cover(nodes)) => nodes.extend(ids(line, &toks)?),
            Some(SolutionFile::Matching(pairs)) => match ids(line, &toks)?.as_slice() {
                &[u, v] => pairs.push((u, v)),
                _ => return Err(bad(line, "expected `<u> <v>`")),
            },
            Some(SolutionFile::Fractional(entries)) => {
                let [u, v, y] = toks.as_slice() else {
                    return Err(bad(line, "expected `<u> <v> <num>/<den>`"));
                };
                let uv = ids(line, &[u, v])?;
                let y: Rational = y.parse().map_err(|_| bad(line, format!("bad value `{y}`")))?;
                entries.push((uv[0], uv[1], y));
            }
            Some(SolutionFile::Clusters(clusters)) => clusters.push(ids(line, &toks)?),
        }
    }
    kind.ok_or_else(|| bad(1, "empty solution file"))
}

/// Outcome of one re-checked invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    /// `None` on success, the reason otherwise.
    pub failure: Option<String>,
}

impl Check {
    fn new(name: &'static str, failure: Option<String>) -> Self {
        Check { name, failure }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Re-checked invariants plus the recomputed objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub checks: Vec<Check>,
    pub weight: Option<String>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            match &c.failure {
                None => {
                    let _ = writeln!(s, "PASS {}", c.name);
                }
                Some(why) => {
                    let _ = writeln!(s, "FAIL {}: {why}", c.name);
                }
            }
        }
        if let Some(w) = &self.weight {
            let _ = writeln!(s, "weight {w}");
        }
        s
    }
}

fn out_of_range(g: &WeightedGraph, nodes: impl IntoIterator<Item = usize>) -> Option<String> {
    nodes.into_iter().find(|&v| v >= g.n()).map(|v| format!("node {v} is not in the graph (n = {})", g.n()))
}

fn edge_lookup(g: &WeightedGraph, pairs: &[(usize, usize)]) -> Result<Vec<usize>, String> {
    pairs
        .iter()
        .map(|&(u, v)| g.edge_id(u, v).ok_or_else(|| format!("({u}, {v}) is not an edge")))
        .collect()
}

/// Recomputes feasibility and weight of `solution` on `g`.
pub fn verify(g: &WeightedGraph, solution: &SolutionFile) -> Verification {
    let mut checks = Vec::new();
    let mut weight = None;
    match solution {
        SolutionFile::Cover(nodes) => {
            let range = out_of_range(g, nodes.iter().copied());
            let ok_range = range.is_none();
            checks.push(Check::new("nodes-in-range", range));
            if ok_range {
                let mut member = vec![false; g.n()];
                for &v in nodes {
                    member[v] = true;
                }
                let uncovered = g.edges().iter().enumerate().find(|&(_, &(u, v))| !member[u] && !member[v]);
                checks.push(Check::new(
                    "covers-every-edge",
                    uncovered.map(|(e, &(u, v))| format!("edge {e} ({u}, {v}) is uncovered")),
                ));
                if g.node_weights().is_some() {
                    let distinct: Vec<usize> = (0..g.n()).filter(|&v| member[v]).collect();
                    weight = Some(g.weight_of(&distinct).to_string());
                }
            }
        }
        SolutionFile::Matching(pairs) => {
            let range = out_of_range(g, pairs.iter().flat_map(|&(u, v)| [u, v]));
            let ok_range = range.is_none();
            checks.push(Check::new("nodes-in-range", range));
            if ok_range {
                let found = edge_lookup(g, pairs);
                checks.push(Check::new("edges-exist", found.as_ref().err().cloned()));
                let mut owner: Vec<Option<(usize, usize)>> = vec![None; g.n()];
                let mut shared = None;
                'outer: for &(u, v) in pairs {
                    for x in [u, v] {
                        if let Some((a, b)) = owner[x] {
                            shared = Some(format!("node {x} is shared by ({a}, {b}) and ({u}, {v})"));
                            break 'outer;
                        }
                        owner[x] = Some((u, v));
                    }
                }
                checks.push(Check::new("endpoints-disjoint", shared));
                if let (Ok(edges), Some(_)) = (&found, g.edge_weights()) {
                    weight = Some(edges.iter().map(|&e| g.edge_weight(e)).sum::<u64>().to_string());
                }
            }
        }
        SolutionFile::Fractional(entries) => {
            let range = out_of_range(g, entries.iter().flat_map(|&(u, v, _)| [u, v]));
            let ok_range = range.is_none();
            checks.push(Check::new("nodes-in-range", range));
            if ok_range {
                let pairs: Vec<(usize, usize)> = entries.iter().map(|&(u, v, _)| (u, v)).collect();
                let found = edge_lookup(g, &pairs);
                checks.push(Check::new("edges-exist", found.as_ref().err().cloned()));
                let zero = Rational::from_integer(0);
                let negative = entries.iter().find(|e| e.2 < zero);
                checks.push(Check::new(
                    "nonnegative",
                    negative.map(|&(u, v, y)| format!("({u}, {v}) has value {y}")),
                ));
                let mut load = vec![zero; g.n()];
                for &(u, v, y) in entries {
                    load[u] += y;
                    load[v] += y;
                }
                let over = (0..g.n()).find(|&v| load[v] > Rational::from_integer(g.node_weight(v) as i128));
                checks.push(Check::new(
                    "within-node-weights",
                    over.map(|v| format!("node {v} carries {} > weight {}", load[v], g.node_weight(v))),
                ));
                let total: Rational = entries.iter().map(|e| e.2).sum();
                weight = Some(total.to_string());
            }
        }
        SolutionFile::Clusters(clusters) => {
            let range = out_of_range(g, clusters.iter().flatten().copied());
            let ok_range = range.is_none();
            checks.push(Check::new("nodes-in-range", range));
            if ok_range {
                let mut owner: Vec<Option<usize>> = vec![None; g.n()];
                let mut shared = None;
                'outer: for (i, c) in clusters.iter().enumerate() {
                    for &v in c {
                        if let Some(j) = owner[v] {
                            shared = Some(format!("node {v} is in clusters {j} and {i}"));
                            break 'outer;
                        }
                        owner[v] = Some(i);
                    }
                }
                checks.push(Check::new("clusters-disjoint", shared));
                let disconnected = clusters.iter().enumerate().find(|(_, c)| !connected(g, c));
                checks.push(Check::new(
                    "clusters-connected",
                    disconnected.map(|(i, _)| format!("cluster {i} is not connected")),
                ));
                weight = Some(clusters.iter().map(Vec::len).sum::<usize>().to_string());
            }
        }
    }
    Verification { checks, weight }
}

fn connected(g: &WeightedGraph, nodes: &[usize]) -> bool {
    let Some(&start) = nodes.first() else { return true };
    let mut inside = vec![false; g.n()];
    for &v in nodes {
        inside[v] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    let mut seen = vec![false; g.n()];
    seen[start] = true;
    let mut stack = vec![start];
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for &(w, _) in g.neighbors(v) {
            if inside[w] && !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == size
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedGraph {
        WeightedGraph::node_weighted(3, vec![(0, 1), (1, 2)], vec![2, 1, 2]).unwrap()
    }

    #[test]
    fn cover_round_trip_passes() {
        let g = path3();
        let c = CoverSolution::new(&g, vec![1]).unwrap();
        let v = verify(&g, &parse_solution(&format_cover(&c)).unwrap());
        assert!(v.passed());
        assert_eq!(v.weight.as_deref(), Some("1"));
    }

    #[test]
    fn uncovered_edge_is_named() {
        let g = path3();
        let v = verify(&g, &parse_solution("cover\n0\n").unwrap());
        assert!(!v.passed());
        assert!(v.render().contains("FAIL covers-every-edge: edge 1 (1, 2) is uncovered"));
    }

    #[test]
    fn shared_node_is_named() {
        let g = WeightedGraph::edge_weighted(3, vec![(0, 1, 1), (1, 2, 1)]).unwrap();
        let v = verify(&g, &parse_solution("matching\n0 1\n1 2\n").unwrap());
        assert!(v.render().contains("node 1 is shared by (0, 1) and (1, 2)"));
    }

    #[test]
    fn fractional_overload_fails() {
        let g = path3();
        let v = verify(&g, &parse_solution("fractional\n0 1 1/2\n1 2 1/2\n").unwrap());
        assert!(v.passed());
        let v = verify(&g, &parse_solution("fractional\n0 1 1\n1 2 1/2\n").unwrap());
        assert!(v.render().contains("FAIL within-node-weights: node 1"));
    }

    #[test]
    fn clusters_checked_for_overlap_and_connectivity() {
        let g = path3();
        assert!(verify(&g, &parse_solution("clusters\n0 1\n2\n").unwrap()).passed());
        assert!(!verify(&g, &parse_solution("clusters\n0 2\n").unwrap()).passed());
        assert!(!verify(&g, &parse_solution("clusters\n0 1\n1 2\n").unwrap()).passed());
    }

    #[test]
    fn malformed_files_rejected() {
        assert!(parse_solution("").is_err());
        assert!(parse_solution("tour\n1\n").is_err());
        assert!(parse_solution("matching\n1\n").is_err());
        assert!(parse_solution("cover\nx\n").is_err());
    }
}
