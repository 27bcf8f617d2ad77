//! Spanning trees with many leaves: a near-linear approximation, an exact
//! solver for small graphs, and checks of the leaf-count lower bounds.

mod approx;
mod bounds;
mod exact;

pub use approx::{approx_max_leaf_tree, approx_unrooted_tree};
pub use bounds::{check_leaf_bounds, LeafBoundReport};
pub use exact::{exact_max_leaf_tree, EXACT_MAX_NODES};

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{validation, Error, Result};
use crate::graph::{Graph, NodeId};

/// A rooted spanning tree stored as parent pointers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    degree: Vec<usize>,
}

impl SpanningTree {
    /// Orients an undirected edge set from `root`. Fails unless the edges
    /// form a spanning tree on `n` nodes.
    pub fn from_edges(n: usize, root: NodeId, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        if root >= n {
            return Err(validation(format!(
                "root {root} out of range for {n} nodes"
            )));
        }
        if edges.len() + 1 != n {
            return Err(validation(format!(
                "a spanning tree on {n} nodes needs {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(validation(format!("invalid tree edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(validation("tree edges do not connect every node"));
        }
        let degree = adj.iter().map(Vec::len).collect();
        Ok(SpanningTree {
            root,
            parent,
            degree,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn tree_degree(&self, v: NodeId) -> usize {
        self.degree[v]
    }

    /// Tree edges as `(child, parent)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
    }

    /// Non-root nodes of tree degree 1.
    pub fn leaves(&self) -> Vec<NodeId> {
        (0..self.node_count())
            .filter(|&v| v != self.root && self.degree[v] == 1)
            .collect()
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        v != self.root && self.degree[v] == 1
    }

    /// Leaves of the underlying unrooted tree (the root counts when its
    /// degree is 1).
    pub fn unrooted_leaf_count(&self) -> usize {
        self.degree.iter().filter(|&&d| d == 1).count()
    }

    /// Nodes on the tree path from `v` up to the root, excluding `v` itself.
    pub fn ancestors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.parent[v], move |&u| self.parent[u])
    }

    /// Confirms the tree is a spanning tree of `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.node_count() != g.node_count() {
            return Err(validation("tree and graph node counts differ"));
        }
        for (child, parent) in self.edges() {
            if !g.has_edge(child, parent) {
                return Err(validation(format!(
                    "tree edge ({child}, {parent}) not in graph"
                )));
            }
        }
        let edges: Vec<_> = self.edges().collect();
        SpanningTree::from_edges(self.node_count(), self.root, &edges).map(|_| ())
    }

    /// `root <id>` followed by one `child parent` line per non-root node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "root {}", self.root).unwrap();
        for (child, parent) in self.edges() {
            writeln!(out, "{child} {parent}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str, n: usize) -> Result<Self> {
        let mut root = None;
        let mut edges = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<NodeId>()
                    .map_err(|_| parse_err(format!("bad id {s:?}")))
            };
            match fields.as_slice() {
                [] => {}
                ["root", id] => root = Some(num(id)?),
                [a, b] => edges.push((num(a)?, num(b)?)),
                _ => return Err(parse_err(format!("unexpected line {line:?}"))),
            }
        }
        let root = root.ok_or_else(|| validation("tree text has no root line"))?;
        Self::from_edges(n, root, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_and_leaves() {
        let t = SpanningTree::from_edges(4, 0, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(t.parent(2), Some(1));
        assert_eq!(t.leaves(), vec![2, 3]);
        assert_eq!(t.unrooted_leaf_count(), 3);
        assert_eq!(t.ancestors(3).collect::<Vec<_>>(), vec![1, 0]);
    }

    #[test]
    fn rejects_non_trees() {
        assert!(SpanningTree::from_edges(4, 0, &[(0, 1), (1, 2)]).is_err());
        assert!(SpanningTree::from_edges(4, 0, &[(0, 1), (1, 0), (2, 3)]).is_err());
        assert!(SpanningTree::from_edges(3, 5, &[(0, 1), (1, 2)]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = SpanningTree::from_edges(5, 2, &[(2, 0), (2, 1), (1, 3), (3, 4)]).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("root 2\n"));
        assert_eq!(SpanningTree::from_text(&text, 5).unwrap(), t);
        assert!(SpanningTree::from_text("0 1\n", 2).is_err());
    }

    #[test]
    fn validate_against_graph() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let good = SpanningTree::from_edges(3, 0, &[(0, 1), (1, 2)]).unwrap();
        good.validate(&g).unwrap();
        let bad = SpanningTree::from_edges(3, 0, &[(0, 1), (0, 2)]).unwrap();
        assert!(bad.validate(&g).is_err());
    }
}
