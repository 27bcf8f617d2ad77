//! The recommendation cascade: offers, purchases, cashback, and revenue,
//! replayable against a threshold tape.

pub(crate) mod exact;
mod tape;

pub use exact::{exact_expected_revenue, EXACT_MAX_CORE_NODES};
pub use tape::{Stream, ThresholdTape};

use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::error::{validation, Result};
use crate::graph::{Graph, NodeId, SeedSet};
use crate::model::{BuyerModel, InfluenceFunction, ModelKind};
use crate::strategy::PricingStrategy;

#[derive(Clone, Debug, PartialEq)]
pub struct Offer {
    pub node: NodeId,
    pub price: f64,
    /// ascending
    pub recommenders: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Purchase {
    pub node: NodeId,
    pub price: f64,
    pub cashback_to: NodeId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CascadeStep {
    pub t: usize,
    pub offers: Vec<Offer>,
    pub purchases: Vec<Purchase>,
}

/// Full record of one cascade run.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeTrace {
    pub steps: Vec<CascadeStep>,
    /// prices paid minus cashback
    pub total_revenue: f64,
    pub active: Vec<bool>,
}

impl CascadeTrace {
    pub fn purchases(&self) -> impl Iterator<Item = &Purchase> {
        self.steps.iter().flat_map(|s| &s.purchases)
    }

    /// Line-oriented dump: `t=<step> offer v=<id> price=<p>` and
    /// `t=<step> buy v=<id> pays=<p> cashback_to=<id>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            for o in &step.offers {
                writeln!(out, "t={} offer v={} price={}", step.t, o.node, o.price).unwrap();
            }
            for p in &step.purchases {
                writeln!(
                    out,
                    "t={} buy v={} pays={} cashback_to={}",
                    step.t, p.node, p.price, p.cashback_to
                )
                .unwrap();
            }
        }
        out
    }
}

/// Monte Carlo estimate of expected revenue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RevenueEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl RevenueEstimate {
    /// Mean and standard error of the mean, summed in order.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        RevenueEstimate {
            mean,
            stderr,
            trials: n,
        }
    }
}

impl fmt::Display for RevenueEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.trials, self.mean, self.stderr)
    }
}

/// Runs one cascade and records every offer and purchase.
pub fn simulate_once(
    g: &Graph,
    seeds: &SeedSet,
    s: &PricingStrategy,
    m: &BuyerModel,
    tape: &ThresholdTape,
    trial: u64,
) -> Result<CascadeTrace> {
    let setup = CascadeSetup::new(g, seeds, s, m)?;
    let mut rec = Recorder::default();
    let total_revenue = setup.run(&mut Scratch::new(g.node_count()), tape, trial, &mut rec);
    Ok(CascadeTrace {
        steps: rec.steps,
        total_revenue,
        active: rec.active,
    })
}

/// Mean and standard error of the revenue over trials `0..trials`.
pub fn estimate_revenue(
    g: &Graph,
    seeds: &SeedSet,
    s: &PricingStrategy,
    m: &BuyerModel,
    tape: &ThresholdTape,
    trials: usize,
) -> Result<RevenueEstimate> {
    Ok(RevenueEstimate::from_samples(&revenue_samples(
        g, seeds, s, m, tape, trials,
    )?))
}

/// Per-trial revenue for trials `0..trials`, in trial order.
pub fn revenue_samples(
    g: &Graph,
    seeds: &SeedSet,
    s: &PricingStrategy,
    m: &BuyerModel,
    tape: &ThresholdTape,
    trials: usize,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(validation("need at least one trial"));
    }
    Ok(CascadeSetup::new(g, seeds, s, m)?.samples(tape, 0..trials as u64))
}

/// Callbacks from the simulation loop. Defaults do nothing, so the
/// revenue-only path compiles down to the bare dynamics.
///
/// Offers pass their `(target, recommender)` pairs, recommenders ascending.
pub(crate) trait Observer {
    fn offer(&mut self, _t: usize, _v: NodeId, _price: f64, _pairs: &[(NodeId, NodeId)]) {}
    fn purchase(&mut self, _t: usize, _v: NodeId, _price: f64, _cashback_to: NodeId) {}
    fn step_end(&mut self, _t: usize) {}
    fn finish(&mut self, _active: &[bool]) {}
}

pub(crate) struct Quiet;
impl Observer for Quiet {}

#[derive(Default)]
struct Recorder {
    steps: Vec<CascadeStep>,
    current: Option<CascadeStep>,
    active: Vec<bool>,
}

impl Recorder {
    fn step(&mut self, t: usize) -> &mut CascadeStep {
        self.current.get_or_insert_with(|| CascadeStep {
            t,
            offers: Vec::new(),
            purchases: Vec::new(),
        })
    }
}

impl Observer for Recorder {
    fn offer(&mut self, t: usize, v: NodeId, price: f64, pairs: &[(NodeId, NodeId)]) {
        let recommenders = pairs.iter().map(|p| p.1).collect();
        self.step(t).offers.push(Offer {
            node: v,
            price,
            recommenders,
        });
    }

    fn purchase(&mut self, t: usize, v: NodeId, price: f64, cashback_to: NodeId) {
        self.step(t).purchases.push(Purchase {
            node: v,
            price,
            cashback_to,
        });
    }

    fn step_end(&mut self, t: usize) {
        let step = self.step(t).clone();
        self.steps.push(step);
        self.current = None;
    }

    fn finish(&mut self, active: &[bool]) {
        self.active = active.to_vec();
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Rule<'a> {
    Icm,
    Ltm(&'a InfluenceFunction),
}

/// Validated, immutable inputs of a cascade. `weight[v]` is the acceptance
/// probability of one recommendation (ICM) or `B(price)` (LTM).
#[derive(Clone, Debug)]
pub(crate) struct CascadeSetup<'a> {
    pub(crate) g: &'a Graph,
    pub(crate) seeds: Vec<NodeId>,
    pub(crate) is_seed: Vec<bool>,
    pub(crate) prices: Vec<f64>,
    pub(crate) weight: Vec<f64>,
    pub(crate) cashback: f64,
    pub(crate) rule: Rule<'a>,
    model: &'a BuyerModel,
}

/// Reusable per-worker buffers.
pub(crate) struct Scratch {
    active: Vec<bool>,
    received: Vec<u32>,
    active_neighbors: Vec<u32>,
    pairs: Vec<(NodeId, NodeId)>,
    frontier: Vec<NodeId>,
    fresh: Vec<NodeId>,
}

impl Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Scratch {
            active: vec![false; n],
            received: vec![0; n],
            active_neighbors: vec![0; n],
            pairs: Vec::new(),
            frontier: Vec::new(),
            fresh: Vec::new(),
        }
    }
}

impl<'a> CascadeSetup<'a> {
    pub(crate) fn new(
        g: &'a Graph,
        seeds: &SeedSet,
        s: &PricingStrategy,
        m: &'a BuyerModel,
    ) -> Result<Self> {
        s.validate(g, seeds)?;
        let rule = match m.kind() {
            ModelKind::Icm(_) => Rule::Icm,
            ModelKind::Ltm(b) => Rule::Ltm(b),
        };
        let prices: Vec<f64> = s.prices().iter().map(|p| p.unwrap_or(0.0)).collect();
        let mut setup = CascadeSetup {
            g,
            seeds: seeds.members().to_vec(),
            is_seed: seeds.mask(g.node_count()),
            weight: vec![0.0; prices.len()],
            prices,
            cashback: s.cashback(),
            rule,
            model: m,
        };
        for v in 0..g.node_count() {
            setup.weight[v] = setup.weight_for(setup.prices[v]);
        }
        Ok(setup)
    }

    fn weight_for(&self, price: f64) -> f64 {
        match self.rule {
            Rule::Ltm(b) => b.influence(price),
            Rule::Icm => self.model.accept_probability(price).unwrap_or(0.0),
        }
    }

    /// Same setup with one node repriced.
    pub(crate) fn set_price(&mut self, v: NodeId, price: f64) {
        self.prices[v] = price;
        self.weight[v] = self.weight_for(price);
    }

    pub(crate) fn samples(&self, tape: &ThresholdTape, trials: std::ops::Range<u64>) -> Vec<f64> {
        let n = self.g.node_count();
        trials
            .into_par_iter()
            .map_init(
                || Scratch::new(n),
                |scratch, trial| self.run(scratch, tape, trial, &mut Quiet),
            )
            .collect()
    }

    /// One cascade; returns the seller's revenue.
    pub(crate) fn run<O: Observer>(
        &self,
        scratch: &mut Scratch,
        tape: &ThresholdTape,
        trial: u64,
        obs: &mut O,
    ) -> f64 {
        let g = self.g;
        let Scratch {
            active,
            received,
            active_neighbors,
            pairs,
            frontier,
            fresh,
        } = scratch;
        active.fill(false);
        received.fill(0);
        if matches!(self.rule, Rule::Ltm(_)) {
            active_neighbors.fill(0);
        }
        frontier.clear();
        for &s in &self.seeds {
            active[s] = true;
            frontier.push(s);
            if matches!(self.rule, Rule::Ltm(_)) {
                for &w in g.neighbors(s) {
                    active_neighbors[w] += 1;
                }
            }
        }

        let mut revenue = 0.0;
        let mut t = 0;
        while !frontier.is_empty() {
            t += 1;
            pairs.clear();
            for &u in frontier.iter() {
                for &w in g.neighbors(u) {
                    if !active[w] {
                        pairs.push((w, u));
                    }
                }
            }
            pairs.sort_unstable();
            fresh.clear();
            let mut i = 0;
            while i < pairs.len() {
                let v = pairs[i].0;
                let mut j = i;
                while j < pairs.len() && pairs[j].0 == v {
                    j += 1;
                }
                let recs = &pairs[i..j];
                let k = recs.len();
                i = j;

                let price = self.prices[v];
                obs.offer(t, v, price, recs);
                let bought = if price <= 0.0 {
                    true
                } else {
                    match self.rule {
                        Rule::Icm => {
                            let p = self.weight[v];
                            let base = received[v];
                            (0..k as u32)
                                .any(|e| tape.uniform(trial, v, Stream::Accept, base + e) < p)
                        }
                        Rule::Ltm(_) => {
                            let alpha = active_neighbors[v] as f64 / g.degree(v) as f64;
                            let theta = 1.0 - tape.uniform(trial, v, Stream::Threshold, 0);
                            theta <= alpha * self.weight[v]
                        }
                    }
                };
                received[v] += k as u32;
                if bought {
                    let to = if k == 1 {
                        recs[0].1
                    } else {
                        let u = tape.uniform(trial, v, Stream::Cashback, 0);
                        recs[((u * k as f64) as usize).min(k - 1)].1
                    };
                    revenue += price - self.cashback;
                    obs.purchase(t, v, price, to);
                    fresh.push(v);
                }
            }
            obs.step_end(t);
            for &v in fresh.iter() {
                active[v] = true;
                if matches!(self.rule, Rule::Ltm(_)) {
                    for &w in g.neighbors(v) {
                        active_neighbors[w] += 1;
                    }
                }
            }
            std::mem::swap(frontier, fresh);
        }
        obs.finish(active);
        revenue
    }
}
