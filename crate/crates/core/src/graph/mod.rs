//! Undirected simple graphs, seed sets, and the structural queries used by
//! the pricing analysis.

mod generate;
mod io;
mod structure;

pub use generate::generate_preferential_attachment;
pub use io::{load_edge_list, write_edge_list, LoadedGraph};
pub use structure::{
    good_vertex_count, good_vertices, merge_seed_set, primitive_path_decomposition, MergedGraph,
    PrimitivePath,
};

use std::collections::VecDeque;

use crate::error::{validation, Result};

pub type NodeId = usize;

/// Immutable undirected simple graph on nodes `0..n`.
///
/// Adjacency lists are sorted ascending and symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate and reversed edges collapse;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(validation(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(validation(format!("self-loop on node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Ok(Graph {
            adjacency,
            edge_count: twice / 2,
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Nodes reachable from any of `sources`, as a membership mask.
    pub fn reachable_from(&self, sources: &[NodeId]) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || self.reachable_from(&[0]).iter().all(|&r| r)
    }

    /// Full scan of the simplicity and symmetry invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.node_count();
        let mut twice = 0;
        for (u, list) in self.adjacency.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(validation(format!("adjacency of {u} not strictly sorted")));
            }
            for &v in list {
                if v >= n || v == u {
                    return Err(validation(format!("bad neighbor {v} of {u}")));
                }
                if !self.has_edge(v, u) {
                    return Err(validation(format!("asymmetric edge {u} -> {v}")));
                }
            }
            twice += list.len();
        }
        if twice != 2 * self.edge_count {
            return Err(validation("edge count mismatch"));
        }
        Ok(())
    }
}

/// Non-empty set of initially active nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedSet {
    members: Vec<NodeId>,
}

impl SeedSet {
    pub fn new(graph: &Graph, members: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut members: Vec<NodeId> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(validation("seed set must be non-empty"));
        }
        if let Some(&bad) = members.iter().find(|&&s| s >= graph.node_count()) {
            return Err(validation(format!(
                "seed {bad} out of range for {} nodes",
                graph.node_count()
            )));
        }
        Ok(SeedSet { members })
    }

    pub fn single(graph: &Graph, seed: NodeId) -> Result<Self> {
        Self::new(graph, [seed])
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Membership mask over `n` nodes.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &s in &self.members {
            mask[s] = true;
        }
        mask
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn rejects_self_loops_and_range() {
        assert!(Graph::from_edges(2, [(1, 1)]).is_err());
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(path(5).is_connected());
        assert!(!Graph::from_edges(4, [(0, 1), (2, 3)])
            .unwrap()
            .is_connected());
        assert_eq!(complete(5).edges().count(), 10);
    }

    #[test]
    fn seed_set_validation() {
        let g = path(3);
        assert!(SeedSet::new(&g, []).is_err());
        assert!(SeedSet::new(&g, [3]).is_err());
        let s = SeedSet::new(&g, [2, 0, 2]).unwrap();
        assert_eq!(s.members(), &[0, 2]);
        assert!(s.contains(2) && !s.contains(1));
    }
}
