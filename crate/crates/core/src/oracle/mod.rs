//! Exact optima on tiny graphs: the best non-adaptive strategy by
//! enumeration, the best adaptive policy by value iteration, and the
//! vertex-cover reduction fixtures.

mod hardness;

pub use hardness::{
    build_hardness_instance, hardness_expected_revenue, layer_sidecar, verify_hardness_structure,
    HardnessInstance, HardnessReport, Layer,
};

use std::collections::HashMap;

use rayon::prelude::*;

use crate::cascade::exact::{bits, buy_probability, expect_over_outcomes, CoreGraph};
use crate::cascade::exact_expected_revenue;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, SeedSet};
use crate::model::BuyerModel;
use crate::strategy::{check_grid, PricingStrategy, Provenance};

/// Most price assignments the non-adaptive enumeration will score.
pub const MAX_ASSIGNMENTS: usize = 250_000;

/// Most (price vector, outcome) pairs the adaptive oracle will expand at a
/// single state.
pub const MAX_ADAPTIVE_BRANCHES: usize = 1 << 22;

/// Values closer than this count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Best non-adaptive strategy over every assignment of grid prices to the
/// non-seed nodes, scored exactly. Ties go to the lexicographically smallest
/// assignment in grid order, nodes in id order.
pub fn optimal_nonadaptive_bruteforce(
    g: &Graph,
    seeds: &SeedSet,
    m: &BuyerModel,
    grid: &[f64],
) -> Result<(PricingStrategy, f64)> {
    let base = PricingStrategy::uniform(g, seeds, grid.first().copied().unwrap_or(0.0))?;
    let vars: Vec<NodeId> = (0..g.node_count())
        .filter(|&v| !seeds.contains(v))
        .collect();
    optimal_restricted(g, seeds, m, &base, &vars, grid)
}

/// Like [`optimal_nonadaptive_bruteforce`], but only `vars` range over the
/// grid; every other node keeps its price (and the cashback) from `base`.
pub fn optimal_restricted(
    g: &Graph,
    seeds: &SeedSet,
    m: &BuyerModel,
    base: &PricingStrategy,
    vars: &[NodeId],
    grid: &[f64],
) -> Result<(PricingStrategy, f64)> {
    check_grid(grid)?;
    base.validate(g, seeds)?;
    if let Some(&v) = vars.iter().find(|&&v| base.price(v).is_none()) {
        return Err(Error::Validation(format!(
            "node {v} is a seed or out of range"
        )));
    }
    let count = u32::try_from(vars.len())
        .ok()
        .and_then(|e| grid.len().checked_pow(e))
        .filter(|&c| c <= MAX_ASSIGNMENTS)
        .ok_or_else(|| {
            Error::Budget(format!(
                "{} prices over {} nodes exceeds {MAX_ASSIGNMENTS} assignments",
                grid.len(),
                vars.len()
            ))
        })?;

    let assignment = |index: usize| {
        let mut s = base.clone().with_provenance(Provenance::Oracle);
        let mut rest = index;
        for &v in vars.iter().rev() {
            s.set_price(v, grid[rest % grid.len()])
                .expect("checked above");
            rest /= grid.len();
        }
        s
    };
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| exact_expected_revenue(g, seeds, &assignment(i), m))
        .collect::<Result<_>>()?;
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let index = values
        .iter()
        .position(|&v| v >= best - TIE_TOLERANCE)
        .expect("non-empty");
    Ok((assignment(index), values[index]))
}

/// Expected revenue of the best adaptive seller, who picks each offered
/// node's price from `grid` at the moment of the offer, knowing everything
/// that has happened so far. No cashback.
pub fn optimal_adaptive_value(
    g: &Graph,
    seeds: &SeedSet,
    m: &BuyerModel,
    grid: &[f64],
) -> Result<f64> {
    check_grid(grid)?;
    if !m.is_icm() {
        return Err(Error::Unsupported(
            "adaptive oracle needs a cascade (ICM) model".into(),
        ));
    }
    let core = CoreGraph::new(g, &seeds.mask(g.node_count()))?;
    let weight: Vec<f64> = grid
        .iter()
        .map(|&p| m.accept_probability(p).unwrap_or(0.0))
        .collect();
    // a folded leaf is offered once and influences nobody: price it greedily
    let leaf_value = grid
        .iter()
        .zip(&weight)
        .map(|(p, w)| p * w)
        .fold(0.0, f64::max);
    let bonus: Vec<f64> = core
        .pendants
        .iter()
        .map(|l| l.len() as f64 * leaf_value)
        .collect();
    let mut policy = Adaptive {
        core: &core,
        grid,
        weight,
        bonus,
        memo: HashMap::new(),
    };
    let start: f64 = bits(core.seed_mask).map(|i| policy.bonus[i]).sum();
    Ok(start + policy.value(core.seed_mask, core.seed_mask)?)
}

struct Adaptive<'c> {
    core: &'c CoreGraph,
    grid: &'c [f64],
    weight: Vec<f64>,
    bonus: Vec<f64>,
    memo: HashMap<(u64, u64), f64>,
}

impl Adaptive<'_> {
    fn value(&mut self, active: u64, frontier: u64) -> Result<f64> {
        if frontier == 0 {
            return Ok(0.0);
        }
        if let Some(&v) = self.memo.get(&(active, frontier)) {
            return Ok(v);
        }
        let candidates = self.core.candidates(active, frontier);
        let c = candidates.len();
        let vectors = u32::try_from(c)
            .ok()
            .and_then(|e| self.grid.len().checked_pow(e));
        match vectors.and_then(|v| v.checked_mul(1 << c)) {
            Some(b) if b <= MAX_ADAPTIVE_BRANCHES => {}
            _ => {
                return Err(Error::Budget(format!(
                "{c} simultaneous offers over {} prices exceed {MAX_ADAPTIVE_BRANCHES} branches",
                self.grid.len()
            )))
            }
        }

        // continuation of each purchase pattern, indexed by candidate position
        let mut continuation = vec![0.0; 1 << c];
        for (pattern, slot) in continuation.iter_mut().enumerate().skip(1) {
            let bought = bits(pattern as u64).fold(0, |m, j| m | 1 << candidates[j].0);
            let bonus: f64 = bits(pattern as u64)
                .map(|j| self.bonus[candidates[j].0])
                .sum();
            *slot = bonus + self.value(active | bought, bought)?;
        }

        let mut best = f64::NEG_INFINITY;
        let mut choice = vec![0usize; c];
        for index in 0..vectors.expect("checked") {
            let mut rest = index;
            for slot in choice.iter_mut().rev() {
                *slot = rest % self.grid.len();
                rest /= self.grid.len();
            }
            let probs: Vec<(usize, f64)> = choice
                .iter()
                .zip(&candidates)
                .enumerate()
                .map(|(j, (&p, &(_, k)))| (j, buy_probability(self.grid[p], self.weight[p], k)))
                .collect();
            let value = expect_over_outcomes(&probs, |pattern| {
                let paid: f64 = bits(pattern).map(|j| self.grid[choice[j]]).sum();
                paid + continuation[pattern as usize]
            });
            best = best.max(value);
        }
        self.memo.insert((active, frontier), best);
        Ok(best)
    }
}

/// The six-node adaptivity-gap example: a 4-cycle 0-1-2-3 with two extra
/// leaves on node 2, seeded at node 0.
pub fn adaptivity_gap_example() -> (Graph, SeedSet) {
    let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (2, 5)]).unwrap();
    let seeds = SeedSet::single(&g, 0).unwrap();
    (g, seeds)
}
