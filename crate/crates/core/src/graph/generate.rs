use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{WeightMode, WeightedGraph};
use crate::error::{input, Error, Result};

/// Graph families understood by [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub enum GraphKind {
    /// Left nodes `0..left`, right nodes `left..left+right`, each cross pair with probability `p`.
    RandomBipartite { left: usize, right: usize, p: f64 },
    /// Erdős–Rényi `G(n, p)`.
    RandomGeneral { n: usize, p: f64 },
    /// Random recursive tree: node `i` attaches to a uniform earlier node.
    RandomTree { n: usize },
    Path { n: usize },
    Cycle { n: usize },
    /// Random pairs added in shuffled order while both degrees stay below the cap.
    BoundedDegree { n: usize, max_degree: usize },
}

impl GraphKind {
    pub fn node_count(&self) -> usize {
        match *self {
            GraphKind::RandomBipartite { left, right, .. } => left + right,
            GraphKind::RandomGeneral { n, .. }
            | GraphKind::RandomTree { n }
            | GraphKind::Path { n }
            | GraphKind::Cycle { n }
            | GraphKind::BoundedDegree { n, .. } => n,
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::RandomBipartite { left, right, p } => {
                write!(f, "random_bipartite:{left},{right},{p}")
            }
            GraphKind::RandomGeneral { n, p } => write!(f, "random_general:{n},{p}"),
            GraphKind::RandomTree { n } => write!(f, "random_tree:{n}"),
            GraphKind::Path { n } => write!(f, "path:{n}"),
            GraphKind::Cycle { n } => write!(f, "cycle:{n}"),
            GraphKind::BoundedDegree { n, max_degree } => {
                write!(f, "bounded_degree:{n},{max_degree}")
            }
        }
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    /// Parses `kind:arg,arg,..`, e.g. `random_bipartite:8,8,0.4`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let args: Vec<&str> = args
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .collect();
        let want = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                input(format!("`{name}` takes {k} argument(s), got {}", args.len()))
            }
        };
        let int = |i: usize| -> Result<usize> {
            args[i]
                .parse()
                .map_err(|_| Error::Input(format!("bad integer `{}`", args[i])))
        };
        let float = |i: usize| -> Result<f64> {
            args[i]
                .parse()
                .map_err(|_| Error::Input(format!("bad probability `{}`", args[i])))
        };
        match name {
            "random_bipartite" => {
                want(3)?;
                Ok(GraphKind::RandomBipartite {
                    left: int(0)?,
                    right: int(1)?,
                    p: float(2)?,
                })
            }
            "random_general" => {
                want(2)?;
                Ok(GraphKind::RandomGeneral {
                    n: int(0)?,
                    p: float(1)?,
                })
            }
            "random_tree" => {
                want(1)?;
                Ok(GraphKind::RandomTree { n: int(0)? })
            }
            "path" => {
                want(1)?;
                Ok(GraphKind::Path { n: int(0)? })
            }
            "cycle" => {
                want(1)?;
                Ok(GraphKind::Cycle { n: int(0)? })
            }
            "bounded_degree" => {
                want(2)?;
                Ok(GraphKind::BoundedDegree {
                    n: int(0)?,
                    max_degree: int(1)?,
                })
            }
            other => input(format!("unknown graph kind `{other}`")),
        }
    }
}

/// Weight range `[1, max_weight]` and which elements carry weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub max_weight: u64,
    pub mode: WeightMode,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_weight: 1,
            mode: WeightMode::Node,
        }
    }
}

/// Generates a graph deterministically from `seed`.
///
/// Structure is drawn first, then node weights in id order, then edge
/// weights in edge order. Edges are listed in lexicographic order.
pub fn generate(kind: &GraphKind, params: &GenParams, seed: u64) -> Result<WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = kind.node_count();
    if n == 0 {
        return input("generator asked for an empty graph");
    }
    if params.max_weight == 0 {
        return input("weight range must be [1, W] with W >= 1");
    }
    let check_p = |p: f64| -> Result<()> {
        if (0.0..=1.0).contains(&p) {
            Ok(())
        } else {
            input(format!("edge probability {p} outside [0, 1]"))
        }
    };
    let mut edges = Vec::new();
    match *kind {
        GraphKind::RandomBipartite { left, right, p } => {
            check_p(p)?;
            for u in 0..left {
                for v in left..left + right {
                    if rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
        }
        GraphKind::RandomGeneral { n, p } => {
            check_p(p)?;
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
        }
        GraphKind::RandomTree { n } => {
            for v in 1..n {
                let parent = rng.random_range(0..v);
                edges.push((parent, v));
            }
        }
        GraphKind::Path { n } => edges.extend((1..n).map(|v| (v - 1, v))),
        GraphKind::Cycle { n } => {
            if n < 3 {
                return input("a cycle needs at least 3 nodes");
            }
            edges.extend((1..n).map(|v| (v - 1, v)));
            edges.push((0, n - 1));
        }
        GraphKind::BoundedDegree { n, max_degree } => {
            let mut pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            pairs.shuffle(&mut rng);
            let mut degree = vec![0usize; n];
            for (u, v) in pairs {
                if degree[u] < max_degree && degree[v] < max_degree {
                    degree[u] += 1;
                    degree[v] += 1;
                    edges.push((u, v));
                }
            }
        }
    }
    edges.sort_unstable();
    let mut draw = |count: usize| -> Vec<u64> {
        (0..count)
            .map(|_| rng.random_range(1..=params.max_weight))
            .collect()
    };
    let node_weights = params.mode.has_node_weights().then(|| draw(n));
    let edge_weights = params.mode.has_edge_weights().then(|| draw(edges.len()));
    WeightedGraph::with_bound(n, edges, node_weights, edge_weights, params.max_weight)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_with_unit_weights() {
        let g = generate(&GraphKind::Path { n: 4 }, &GenParams::default(), 0).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(g.node_weights().unwrap(), &[1, 1, 1, 1]);
    }

    #[test]
    fn full_probability_gives_complete_bipartite() {
        let kind = GraphKind::RandomBipartite {
            left: 5,
            right: 5,
            p: 1.0,
        };
        let g = generate(&kind, &GenParams::default(), 3).unwrap();
        assert_eq!(g.m(), 25);
        assert!(g.is_bipartite());
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let kind = GraphKind::RandomGeneral { n: 30, p: 0.2 };
        let params = GenParams {
            max_weight: 20,
            mode: WeightMode::Both,
        };
        assert_eq!(
            generate(&kind, &params, 11).unwrap(),
            generate(&kind, &params, 11).unwrap()
        );
    }

    #[test]
    fn rejects_bad_requests() {
        let p = GenParams::default();
        assert!(generate(&GraphKind::RandomGeneral { n: 5, p: 1.5 }, &p, 0).is_err());
        assert!(generate(&GraphKind::Path { n: 0 }, &p, 0).is_err());
    }

    #[test]
    fn bounded_degree_respects_cap() {
        let kind = GraphKind::BoundedDegree {
            n: 40,
            max_degree: 3,
        };
        let g = generate(&kind, &GenParams::default(), 9).unwrap();
        assert!(g.max_degree() <= 3);
    }

    #[test]
    fn kind_round_trips_through_text() {
        for s in ["random_bipartite:8,8,0.4", "cycle:6", "bounded_degree:10,3"] {
            assert_eq!(s.parse::<GraphKind>().unwrap().to_string(), s);
        }
        assert!("star:4".parse::<GraphKind>().is_err());
    }
}
