use super::SpanningTree;
use crate::error::{validation, Result};
use crate::graph::{Graph, NodeId};

/// Approximate max-leaf spanning tree, oriented from `root`.
///
/// The unrooted tree does not depend on `root`; if `root` ends up with tree
/// degree 1 it is simply not counted among [`SpanningTree::leaves`].
pub fn approx_max_leaf_tree(g: &Graph, root: NodeId) -> Result<SpanningTree> {
    if root >= g.node_count() {
        return Err(validation(format!("root {root} out of range")));
    }
    let edges = approx_unrooted_tree(g)?;
    SpanningTree::from_edges(g.node_count(), root, &edges)
}

/// Edges of the approximate max-leaf spanning tree.
///
/// Leafy-forest expansion: every vertex with at least three neighbors
/// outside the forest seeds a new tree, which keeps absorbing vertices while
/// one of its leaves can be expanded profitably. The forest is then joined
/// into a spanning tree, preferring connections that do not consume forest
/// leaves. Ties break on the smallest node id.
pub fn approx_unrooted_tree(g: &Graph) -> Result<Vec<(NodeId, NodeId)>> {
    let n = g.node_count();
    if n == 0 || !g.is_connected() {
        return Err(validation(
            "max-leaf spanning tree needs a connected, non-empty graph",
        ));
    }
    let mut forest = Forest::new(g);
    for v in 0..n {
        if !forest.member[v] && forest.outside_degree(v) >= 3 {
            forest.grow_tree(v);
        }
    }
    Ok(connect(g, &forest))
}

struct Forest<'g> {
    g: &'g Graph,
    member: Vec<bool>,
    /// forest degree of each member
    degree: Vec<usize>,
    edges: Vec<(NodeId, NodeId)>,
}

impl<'g> Forest<'g> {
    fn new(g: &'g Graph) -> Self {
        let n = g.node_count();
        Forest {
            g,
            member: vec![false; n],
            degree: vec![0; n],
            edges: Vec::new(),
        }
    }

    fn outside(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| !self.member[w])
    }

    fn outside_degree(&self, v: NodeId) -> usize {
        self.outside(v).count()
    }

    fn attach(&mut self, parent: NodeId, child: NodeId) {
        self.member[child] = true;
        self.degree[parent] += 1;
        self.degree[child] += 1;
        self.edges.push((parent, child));
    }

    /// Absorbs all outside neighbors of `v` as its children; returns them.
    fn absorb_neighbors(&mut self, v: NodeId) -> Vec<NodeId> {
        let fresh: Vec<NodeId> = self.outside(v).collect();
        for &w in &fresh {
            self.attach(v, w);
        }
        fresh
    }

    fn grow_tree(&mut self, center: NodeId) {
        self.member[center] = true;
        let mut leaves = self.absorb_neighbors(center);
        loop {
            // (leaves gained, leaf index, expansion through a single neighbor)
            let mut best: Option<(usize, usize, Option<NodeId>)> = None;
            for (i, &x) in leaves.iter().enumerate() {
                let out: Vec<NodeId> = self.outside(x).collect();
                let candidate = match out.len() {
                    0 => None,
                    1 => {
                        let y = out[0];
                        let beyond = self.outside(y).filter(|&z| z != x).count();
                        (beyond >= 2).then(|| (beyond - 1, i, Some(y)))
                    }
                    k => Some((k - 1, i, None)),
                };
                if let Some(c) = candidate {
                    if best.is_none_or(|b| c.0 > b.0) {
                        best = Some(c);
                    }
                }
            }
            let Some((_, i, via)) = best else { break };
            let x = leaves.swap_remove(i);
            match via {
                None => leaves.extend(self.absorb_neighbors(x)),
                Some(y) => {
                    self.attach(x, y);
                    leaves.extend(self.absorb_neighbors(y));
                }
            }
            leaves.sort_unstable();
        }
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Joins the forest into a spanning tree by Kruskal over the remaining
/// edges, cheapest first. An edge costs 2 per endpoint that is a forest leaf
/// (it would stop being a leaf) and 1 per endpoint outside the forest.
fn connect(g: &Graph, forest: &Forest<'_>) -> Vec<(NodeId, NodeId)> {
    let n = g.node_count();
    let mut sets = DisjointSets::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for &(u, v) in &forest.edges {
        sets.union(u, v);
        tree.push((u, v));
    }
    let cost = |v: NodeId| -> u8 {
        match (forest.member[v], forest.degree[v]) {
            (false, _) => 1,
            (true, 1) => 2,
            (true, _) => 0,
        }
    };
    let mut candidates: Vec<(u8, NodeId, NodeId)> =
        g.edges().map(|(u, v)| (cost(u) + cost(v), u, v)).collect();
    candidates.sort_unstable();
    for (_, u, v) in candidates {
        if tree.len() + 1 == n {
            break;
        }
        if sets.union(u, v) {
            tree.push((u, v));
        }
    }
    tree
}
