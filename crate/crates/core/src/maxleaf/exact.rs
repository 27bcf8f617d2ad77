use super::SpanningTree;
use crate::error::{validation, Error, Result};
use crate::graph::{Graph, NodeId};

/// Largest graph the exhaustive solver accepts.
pub const EXACT_MAX_NODES: usize = 14;

/// Exact max-leaf spanning tree, rooted at node 0, with its (unrooted) leaf
/// count.
///
/// On `n >= 3` nodes the interior of a spanning tree is a connected
/// dominating set and vice versa, so the optimum has `n - γ_c` leaves where
/// `γ_c` is the connected domination number. Subsets are enumerated by
/// size; among minimum sets, one containing node 0 is preferred so the root
/// is interior whenever possible.
pub fn exact_max_leaf_tree(g: &Graph) -> Result<(SpanningTree, usize)> {
    let n = g.node_count();
    if n > EXACT_MAX_NODES {
        return Err(Error::Budget(format!(
            "exact max-leaf search is limited to {EXACT_MAX_NODES} nodes, graph has {n}"
        )));
    }
    if n == 0 || !g.is_connected() {
        return Err(validation(
            "max-leaf spanning tree needs a connected, non-empty graph",
        ));
    }
    if n <= 2 {
        let edges: Vec<_> = g.edges().collect();
        let tree = SpanningTree::from_edges(n, 0, &edges)?;
        let count = tree.unrooted_leaf_count();
        return Ok((tree, count));
    }

    let closed: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(1u32 << v, |m, &w| m | (1 << w)))
        .collect();
    let full: u32 = (1u32 << n) - 1;

    let mut masks: Vec<u32> = (1..=full).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m & 1 == 0, m));
    let interior = masks
        .into_iter()
        .find(|&m| dominates(&closed, m, full) && induces_connected(g, m))
        .expect("the full vertex set is a connected dominating set");

    let edges = tree_from_interior(g, interior);
    let tree = SpanningTree::from_edges(n, 0, &edges)?;
    let count = tree.unrooted_leaf_count();
    debug_assert_eq!(count, n - interior.count_ones() as usize);
    Ok((tree, count))
}

fn dominates(closed: &[u32], mask: u32, full: u32) -> bool {
    let mut covered = 0;
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        covered |= closed[v];
        rest &= rest - 1;
    }
    covered == full
}

fn induces_connected(g: &Graph, mask: u32) -> bool {
    let start = mask.trailing_zeros() as usize;
    let mut seen = 1u32 << start;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            let bit = 1u32 << w;
            if mask & bit != 0 && seen & bit == 0 {
                seen |= bit;
                stack.push(w);
            }
        }
    }
    seen == mask
}

/// BFS tree of the interior set, with every other node hung off its
/// smallest interior neighbor.
fn tree_from_interior(g: &Graph, interior: u32) -> Vec<(NodeId, NodeId)> {
    let n = g.node_count();
    let inside = |v: NodeId| interior & (1 << v) != 0;
    let start = interior.trailing_zeros() as usize;
    let mut edges = Vec::with_capacity(n - 1);
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if inside(w) && !seen[w] {
                seen[w] = true;
                edges.push((u, w));
                queue.push_back(w);
            }
        }
    }
    for v in (0..n).filter(|&v| !inside(v)) {
        let hub = g.neighbors(v).iter().copied().find(|&w| inside(w)).unwrap();
        edges.push((hub, v));
    }
    edges
}
