use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Graph, NodeId};
use crate::error::{validation, Result};

/// Preferential-attachment graph: a clique on `m + 1` nodes, then every new
/// node attaches to `m` distinct existing nodes drawn proportionally to their
/// current degree. The result is connected and has
/// `m(m+1)/2 + m(n - m - 1)` edges.
pub fn generate_preferential_attachment(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || n < m + 1 {
        return Err(validation(format!(
            "preferential attachment needs n >= m + 1 >= 2 (got n={n}, m={m})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(m * n);
    // Every edge endpoint once: sampling uniformly from this list is
    // sampling proportionally to degree.
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * m * n);

    for u in 0..=m {
        for v in u + 1..=m {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }

    let mut targets: Vec<NodeId> = Vec::with_capacity(m);
    for v in m + 1..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, edges)
}
