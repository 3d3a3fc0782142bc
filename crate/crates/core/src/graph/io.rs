//! Line-based text format.
//!
//! ```text
//! graph <n> <node|edge|both> <W>
//! v <id> <weight>          # node and both modes, one line per node
//! e <u> <v> [<weight>]     # weight required in edge and both modes
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{weight_cap, WeightMode, WeightedGraph};
use crate::error::{Error, Result};

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    match tok {
        None => parse_err(line, format!("missing {what}")),
        Some(t) => t
            .parse()
            .map_err(|_| Error::Parse {
                line,
                message: format!("bad {what} `{t}`"),
            }),
    }
}

/// Parses the text format.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut header: Option<(usize, WeightMode, u64)> = None;
    let mut node_weights: Vec<Option<u64>> = Vec::new();
    let mut edges = Vec::new();
    let mut edge_weights = Vec::new();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        match (tag, header) {
            ("graph", None) => {
                let n: usize = number(toks.next(), line, "node count")?;
                if n == 0 {
                    return parse_err(line, "graph must have at least one node");
                }
                let mode: WeightMode = match toks.next() {
                    Some(m) => m.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("bad mode `{m}`"),
                    })?,
                    None => return parse_err(line, "missing mode"),
                };
                let w: u64 = number(toks.next(), line, "weight bound")?;
                if w == 0 || w > weight_cap(n) {
                    return parse_err(line, format!("weight bound {w} outside [1, n^10]"));
                }
                header = Some((n, mode, w));
                node_weights = vec![None; n];
            }
            ("graph", Some(_)) => return parse_err(line, "duplicate header"),
            (_, None) => return parse_err(line, "expected `graph` header first"),
            ("v", Some((n, mode, w))) => {
                if !mode.has_node_weights() {
                    return parse_err(line, "node lines are not allowed in edge mode");
                }
                let id: usize = number(toks.next(), line, "node id")?;
                let weight: u64 = number(toks.next(), line, "node weight")?;
                if id >= n {
                    return parse_err(line, format!("node {id} out of range (n = {n})"));
                }
                if weight == 0 || weight > w {
                    return parse_err(line, format!("node weight {weight} outside [1, {w}]"));
                }
                if node_weights[id].replace(weight).is_some() {
                    return parse_err(line, format!("node {id} listed twice"));
                }
            }
            ("e", Some((n, mode, w))) => {
                let u: usize = number(toks.next(), line, "endpoint")?;
                let v: usize = number(toks.next(), line, "endpoint")?;
                if u >= n || v >= n {
                    return parse_err(line, format!("edge ({u}, {v}) references a node >= {n}"));
                }
                if u == v {
                    return parse_err(line, format!("self-loop at node {u}"));
                }
                match (mode.has_edge_weights(), toks.next()) {
                    (true, tok @ Some(_)) => {
                        let weight: u64 = number(tok, line, "edge weight")?;
                        if weight == 0 || weight > w {
                            return parse_err(
                                line,
                                format!("edge weight {weight} outside [1, {w}]"),
                            );
                        }
                        edge_weights.push(weight);
                    }
                    (true, None) => return parse_err(line, "edge weight required"),
                    (false, Some(_)) => {
                        return parse_err(line, "edge weight not allowed in node mode")
                    }
                    (false, None) => {}
                }
                edges.push((u, v));
            }
            (other, Some(_)) => return parse_err(line, format!("unknown record `{other}`")),
        }
        if toks.next().is_some() {
            return parse_err(line, "trailing tokens");
        }
    }
    let Some((n, mode, w)) = header else {
        return parse_err(last.max(1), "missing `graph` header");
    };
    let node_weights = if mode.has_node_weights() {
        let mut ws = Vec::with_capacity(n);
        for (v, nw) in node_weights.into_iter().enumerate() {
            match nw {
                Some(x) => ws.push(x),
                None => return parse_err(last, format!("missing weight for node {v}")),
            }
        }
        Some(ws)
    } else {
        None
    };
    let edge_weights = mode.has_edge_weights().then_some(edge_weights);
    WeightedGraph::with_bound(n, edges, node_weights, edge_weights, w).map_err(|e| match e {
        Error::Input(message) => Error::Parse {
            line: last,
            message,
        },
        other => other,
    })
}

/// Renders `g` in the text format.
pub fn format_graph(g: &WeightedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {} {} {}", g.n(), g.mode(), g.max_weight());
    if let Some(ws) = g.node_weights() {
        for (v, w) in ws.iter().enumerate() {
            let _ = writeln!(out, "v {v} {w}");
        }
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        match g.edge_weights() {
            Some(ws) => {
                let _ = writeln!(out, "e {u} {v} {}", ws[e]);
            }
            None => {
                let _ = writeln!(out, "e {u} {v}");
            }
        }
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text)
}

pub fn write_graph(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_graph(g))
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn parses_all_modes() {
        let g = parse_graph("# demo\ngraph 3 both 9\nv 0 1\nv 1 2\nv 2 3\ne 0 1 4\ne 1 2 9 # heavy\n")
            .unwrap();
        assert_eq!(g.mode(), WeightMode::Both);
        assert_eq!(g.edge_weights().unwrap(), &[4, 9]);
        let g = parse_graph("graph 2 edge 5\ne 0 1 5\n").unwrap();
        assert_eq!(g.node_weights(), None);
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(line_of(parse_graph("graph 0 node 1\n").unwrap_err()), 1);
        assert_eq!(
            line_of(parse_graph("graph 2 node 1\nv 0 1\nv 1 1\ne 0 2\n").unwrap_err()),
            4
        );
        assert_eq!(line_of(parse_graph("graph 2 edge 3\ne 0 1\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_graph("graph 2 node 3\nv 0 1\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_graph("x 1\n").unwrap_err()), 1);
    }

    #[test]
    fn round_trip() {
        let g = WeightedGraph::new(
            4,
            vec![(0, 1), (2, 3), (1, 2)],
            Some(vec![3, 1, 4, 1]),
            Some(vec![5, 9, 2]),
        )
        .unwrap();
        assert_eq!(parse_graph(&format_graph(&g)).unwrap(), g);
    }
}
