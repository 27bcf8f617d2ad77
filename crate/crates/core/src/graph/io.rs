use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Graph, NodeId};
use crate::error::{validation, Error, Result};

/// A graph read from edge-list text, with the original id of every node.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `original_ids[v]` is the id node `v` carried in the input.
    pub original_ids: Vec<u64>,
}

/// Parses whitespace-separated `u v` lines. Blank lines and `#` comments are
/// skipped.
///
/// Without a `# nodes=<n>` header, ids are compacted to `0..k` in ascending
/// order of their input value (contiguous inputs map to themselves). With the
/// header the ids are kept verbatim and the graph has `n` nodes, so isolated
/// nodes written by [`write_edge_list`] survive a round trip.
pub fn load_edge_list(text: &str) -> Result<LoadedGraph> {
    let mut declared_nodes: Option<usize> = None;
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(n) = header_node_count(comment) {
                declared_nodes = Some(n);
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two node ids, got {trimmed:?}"),
            });
        };
        let parse = |s: &str| {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid node id {s:?}"),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            return Err(validation(format!(
                "self-loop on node {u} (line {line_no})"
            )));
        }
        raw_edges.push((u, v));
    }

    match declared_nodes {
        Some(n) => {
            let mut edges = Vec::with_capacity(raw_edges.len());
            for &(u, v) in &raw_edges {
                if u >= n as u64 || v >= n as u64 {
                    return Err(validation(format!(
                        "edge ({u}, {v}) exceeds declared node count {n}"
                    )));
                }
                edges.push((u as NodeId, v as NodeId));
            }
            Ok(LoadedGraph {
                graph: Graph::from_edges(n, edges)?,
                original_ids: (0..n as u64).collect(),
            })
        }
        None => {
            let mut index: BTreeMap<u64, NodeId> = BTreeMap::new();
            for &(u, v) in &raw_edges {
                index.insert(u, 0);
                index.insert(v, 0);
            }
            for (i, slot) in index.values_mut().enumerate() {
                *slot = i;
            }
            let edges = raw_edges.iter().map(|(u, v)| (index[u], index[v]));
            Ok(LoadedGraph {
                graph: Graph::from_edges(index.len(), edges)?,
                original_ids: index.keys().copied().collect(),
            })
        }
    }
}

fn header_node_count(comment: &str) -> Option<usize> {
    comment
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix("nodes="))
        .and_then(|n| n.parse().ok())
}

/// Serializes a graph with a `# nodes=<n> edges=<m>` header.
pub fn write_edge_list(graph: &Graph) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# nodes={} edges={}",
        graph.node_count(),
        graph.edge_count()
    )
    .unwrap();
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn path_from_two_lines() {
        let loaded = load_edge_list("0 1\n1 2").unwrap();
        assert_eq!(loaded.graph.node_count(), 3);
        assert_eq!(loaded.graph.edge_count(), 2);
        assert_eq!(loaded.original_ids, vec![0, 1, 2]);
    }

    #[test]
    fn duplicate_lines_collapse() {
        let loaded = load_edge_list("0 1\n1 0\n0 1").unwrap();
        assert_eq!(loaded.graph.edge_count(), 1);
        assert_eq!(loaded.graph.node_count(), 2);
    }

    #[test]
    fn self_loop_rejected() {
        assert!(matches!(load_edge_list("0 0"), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = load_edge_list("# hi\n0 1\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(matches!(
            load_edge_list("1 2 3"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_edge_list("7"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn sparse_ids_are_compacted() {
        let loaded = load_edge_list("# comment\n10 20\n\n20 35\n").unwrap();
        assert_eq!(loaded.original_ids, vec![10, 20, 35]);
        assert!(loaded.graph.has_edge(0, 1) && loaded.graph.has_edge(1, 2));
    }

    #[test]
    fn header_keeps_isolated_nodes() {
        let g = Graph::from_edges(5, [(0, 3)]).unwrap();
        let text = write_edge_list(&g);
        assert!(text.starts_with("# nodes=5 edges=1\n"));
        assert_eq!(load_edge_list(&text).unwrap().graph, g);
    }

    proptest! {
        #[test]
        fn write_then_load_is_identity(n in 1usize..30, raw in proptest::collection::vec((0usize..30, 0usize..30), 0..80)) {
            let edges: Vec<_> = raw.into_iter().filter(|(u, v)| u != v && *u < n && *v < n).collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let back = load_edge_list(&write_edge_list(&g)).unwrap().graph;
            prop_assert_eq!(back, g);
        }
    }
}
