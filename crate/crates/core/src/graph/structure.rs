use super::{Graph, NodeId, SeedSet};
use crate::error::{validation, Result};

/// Mask of good vertices: degree at least 3, or adjacent to such a vertex.
pub fn good_vertices(g: &Graph) -> Vec<bool> {
    let mut good = vec![false; g.node_count()];
    for v in 0..g.node_count() {
        if g.degree(v) >= 3 {
            good[v] = true;
            for &w in g.neighbors(v) {
                good[w] = true;
            }
        }
    }
    good
}

pub fn good_vertex_count(g: &Graph) -> usize {
    good_vertices(g).into_iter().filter(|&b| b).count()
}

/// A graph with its seed set contracted to a single node.
#[derive(Clone, Debug)]
pub struct MergedGraph {
    pub graph: Graph,
    pub seed: NodeId,
    /// Image of every original node in `graph`.
    pub mapping: Vec<NodeId>,
}

impl MergedGraph {
    /// Original nodes mapped to each merged node.
    pub fn preimages(&self) -> Vec<Vec<NodeId>> {
        let mut pre = vec![Vec::new(); self.graph.node_count()];
        for (orig, &img) in self.mapping.iter().enumerate() {
            pre[img].push(orig);
        }
        pre
    }
}

/// Collapses all seeds onto the smallest seed id. Non-seed nodes keep their
/// relative order, so a singleton seed set yields the identity mapping.
pub fn merge_seed_set(g: &Graph, seeds: &SeedSet) -> Result<MergedGraph> {
    let n = g.node_count();
    if let Some(&bad) = seeds.members().iter().find(|&&s| s >= n) {
        return Err(validation(format!("seed {bad} out of range for {n} nodes")));
    }
    let is_seed = seeds.mask(n);
    let anchor = seeds.members()[0];
    let mut mapping = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        if is_seed[v] && v != anchor {
            continue;
        }
        mapping[v] = next;
        next += 1;
    }
    let merged_seed = mapping[anchor];
    for &s in seeds.members() {
        mapping[s] = merged_seed;
    }
    let edges = g
        .edges()
        .map(|(u, v)| (mapping[u], mapping[v]))
        .filter(|(a, b)| a != b);
    Ok(MergedGraph {
        graph: Graph::from_edges(next, edges)?,
        seed: merged_seed,
        mapping,
    })
}

/// A maximal path of `G - A`, where `A` is the set of degree-≥3 vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitivePath {
    /// Path vertices in walk order.
    pub nodes: Vec<NodeId>,
    /// Degree-≥3 vertices adjacent to the path, ascending.
    pub attachments: Vec<NodeId>,
    /// True when the component of `G - A` is a cycle (only when `A` is empty).
    pub closed: bool,
}

/// Decomposes `G - A` into primitive paths. Every vertex of degree at most 2
/// lies on exactly one returned path.
pub fn primitive_path_decomposition(g: &Graph) -> Result<Vec<PrimitivePath>> {
    if !g.is_connected() {
        return Err(validation(
            "primitive path decomposition needs a connected graph",
        ));
    }
    let n = g.node_count();
    let in_a: Vec<bool> = (0..n).map(|v| g.degree(v) >= 3).collect();
    let in_a = &in_a;
    let inner = |v: NodeId| g.neighbors(v).iter().copied().filter(move |&w| !in_a[w]);

    let mut visited = in_a.clone();
    let mut paths = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        // Collect the component of `start` in G - A (a path or a cycle).
        let mut component = vec![start];
        visited[start] = true;
        let mut i = 0;
        while i < component.len() {
            for w in inner(component[i]) {
                if !visited[w] {
                    visited[w] = true;
                    component.push(w);
                }
            }
            i += 1;
        }
        let endpoint = component
            .iter()
            .copied()
            .filter(|&v| inner(v).count() <= 1)
            .min();
        let closed = endpoint.is_none();
        let first = endpoint.unwrap_or_else(|| *component.iter().min().unwrap());

        let mut nodes = Vec::with_capacity(component.len());
        let mut prev: Option<NodeId> = None;
        let mut cur = first;
        loop {
            nodes.push(cur);
            let next = inner(cur).filter(|&w| Some(w) != prev && w != first).min();
            match next {
                Some(w) if nodes.len() < component.len() => {
                    prev = Some(cur);
                    cur = w;
                }
                _ => break,
            }
        }
        debug_assert_eq!(nodes.len(), component.len());

        let mut attachments: Vec<NodeId> = nodes
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().copied().filter(|&w| in_a[w]))
            .collect();
        attachments.sort_unstable();
        attachments.dedup();
        paths.push(PrimitivePath {
            nodes,
            attachments,
            closed,
        });
    }
    Ok(paths)
}
