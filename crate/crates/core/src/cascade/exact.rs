use std::collections::HashMap;

use super::{CascadeSetup, Rule};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, SeedSet};
use crate::model::BuyerModel;
use crate::strategy::PricingStrategy;

/// Largest number of nodes left after folding pendant leaves into their
/// neighbors that the exact evaluators accept.
pub const EXACT_MAX_CORE_NODES: usize = 16;

/// Exact expected revenue of a non-adaptive strategy under a cascade model,
/// by exhaustive branching over every step's purchase outcomes.
///
/// Non-seed leaves are folded into their neighbor: such a leaf is offered
/// exactly once, right after its neighbor activates, and influences nobody
/// else, so it contributes a fixed expected amount at that moment. The
/// remaining state is the pair (active set, newly active set).
pub fn exact_expected_revenue(
    g: &Graph,
    seeds: &SeedSet,
    s: &PricingStrategy,
    m: &BuyerModel,
) -> Result<f64> {
    let setup = CascadeSetup::new(g, seeds, s, m)?;
    if let Rule::Ltm(_) = setup.rule {
        return Err(Error::Unsupported(
            "exact expectation is only available for cascade (ICM) models".into(),
        ));
    }
    let core = CoreGraph::new(g, &setup.is_seed)?;
    let gain = |v: NodeId| setup.prices[v] - setup.cashback;
    let bonus: Vec<f64> = core
        .pendants
        .iter()
        .map(|leaves| leaves.iter().map(|&l| setup.weight[l] * gain(l)).sum())
        .collect();
    let mut eval = NonAdaptive {
        core: &core,
        price: core.nodes.iter().map(|&v| setup.prices[v]).collect(),
        weight: core.nodes.iter().map(|&v| setup.weight[v]).collect(),
        gain: core.nodes.iter().map(|&v| gain(v)).collect(),
        bonus,
        memo: HashMap::new(),
    };
    let start: f64 = bits(core.seed_mask).map(|i| eval.bonus[i]).sum();
    Ok(start + eval.value(core.seed_mask, core.seed_mask))
}

/// The graph with non-seed leaves folded into their neighbors, indexed by
/// bit position.
#[derive(Clone, Debug)]
pub(crate) struct CoreGraph {
    /// original id of each core node
    pub(crate) nodes: Vec<NodeId>,
    pub(crate) neighbor_mask: Vec<u64>,
    /// folded leaves per core node, original ids
    pub(crate) pendants: Vec<Vec<NodeId>>,
    pub(crate) seed_mask: u64,
}

impl CoreGraph {
    pub(crate) fn new(g: &Graph, is_seed: &[bool]) -> Result<Self> {
        let n = g.node_count();
        let mut folded = vec![false; n];
        for v in 0..n {
            if !is_seed[v] && g.degree(v) == 1 && !folded[g.neighbors(v)[0]] {
                folded[v] = true;
            }
        }
        let nodes: Vec<NodeId> = (0..n).filter(|&v| !folded[v]).collect();
        if nodes.len() > EXACT_MAX_CORE_NODES {
            return Err(Error::Budget(format!(
                "exact evaluation handles at most {EXACT_MAX_CORE_NODES} non-leaf nodes, graph has {}",
                nodes.len()
            )));
        }
        let mut index = vec![usize::MAX; n];
        for (i, &v) in nodes.iter().enumerate() {
            index[v] = i;
        }
        let mut neighbor_mask = vec![0u64; nodes.len()];
        let mut pendants = vec![Vec::new(); nodes.len()];
        for (i, &v) in nodes.iter().enumerate() {
            for &w in g.neighbors(v) {
                if folded[w] {
                    pendants[i].push(w);
                } else {
                    neighbor_mask[i] |= 1 << index[w];
                }
            }
        }
        let seed_mask = nodes
            .iter()
            .enumerate()
            .filter(|(_, &v)| is_seed[v])
            .fold(0, |m, (i, _)| m | 1 << i);
        Ok(CoreGraph {
            nodes,
            neighbor_mask,
            pendants,
            seed_mask,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Inactive core nodes adjacent to the frontier, with their number of
    /// recommending neighbors.
    pub(crate) fn candidates(&self, active: u64, frontier: u64) -> Vec<(usize, u32)> {
        (0..self.len())
            .filter(|&i| active & (1 << i) == 0)
            .filter_map(|i| {
                let k = (self.neighbor_mask[i] & frontier).count_ones();
                (k > 0).then_some((i, k))
            })
            .collect()
    }
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            i
        })
    })
}

/// Probability that a node offered at `price` buys after `k` independent
/// recommendations, each accepted with probability `weight`.
pub(crate) fn buy_probability(price: f64, weight: f64, k: u32) -> f64 {
    if price <= 0.0 {
        1.0
    } else {
        1.0 - (1.0 - weight).powi(k as i32)
    }
}

/// Expected value over the purchase outcomes of independent candidates,
/// given each candidate's buy probability. `continuation(bought)` scores
/// one joint outcome.
pub(crate) fn expect_over_outcomes(
    candidates: &[(usize, f64)],
    mut continuation: impl FnMut(u64) -> f64,
) -> f64 {
    let mut sure = 0u64;
    let mut uncertain = Vec::new();
    for &(i, q) in candidates {
        if q >= 1.0 {
            sure |= 1 << i;
        } else if q > 0.0 {
            uncertain.push((i, q));
        }
    }
    let mut total = 0.0;
    for pattern in 0u64..(1 << uncertain.len()) {
        let mut prob = 1.0;
        let mut bought = sure;
        for (b, &(i, q)) in uncertain.iter().enumerate() {
            if pattern & (1 << b) != 0 {
                prob *= q;
                bought |= 1 << i;
            } else {
                prob *= 1.0 - q;
            }
        }
        total += prob * continuation(bought);
    }
    total
}

struct NonAdaptive<'c> {
    core: &'c CoreGraph,
    price: Vec<f64>,
    weight: Vec<f64>,
    gain: Vec<f64>,
    bonus: Vec<f64>,
    memo: HashMap<(u64, u64), f64>,
}

impl NonAdaptive<'_> {
    fn value(&mut self, active: u64, frontier: u64) -> f64 {
        if frontier == 0 {
            return 0.0;
        }
        if let Some(&v) = self.memo.get(&(active, frontier)) {
            return v;
        }
        let candidates: Vec<(usize, f64)> = self
            .core
            .candidates(active, frontier)
            .into_iter()
            .map(|(i, k)| (i, buy_probability(self.price[i], self.weight[i], k)))
            .collect();
        let value = expect_over_outcomes(&candidates, |bought| {
            if bought == 0 {
                return 0.0;
            }
            let immediate: f64 = bits(bought).map(|i| self.gain[i] + self.bonus[i]).sum();
            immediate + self.value(active | bought, bought)
        });
        self.memo.insert((active, frontier), value);
        value
    }
}
