//! Local search over single-node price edits, compared under common random
//! thresholds.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::cascade::{CascadeSetup, Observer, RevenueEstimate, Scratch, ThresholdTape};
use crate::error::{validation, Result};
use crate::graph::{Graph, NodeId, SeedSet};
use crate::model::BuyerModel;
use crate::strategy::{check_grid, PricingStrategy, Provenance};

/// How large an improvement must be before a candidate is adopted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsilonRule {
    Absolute(f64),
    /// multiple of the incumbent's standard error
    IncumbentStderr(f64),
    /// multiple of the standard error of the per-trial difference between
    /// candidate and incumbent
    PairedStderr(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VisitOrder {
    /// descending degree, ties by id
    DegreeDescending,
    Ascending,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub grid: Vec<f64>,
    pub epsilon: EpsilonRule,
    pub trials: usize,
    pub order: VisitOrder,
    pub max_passes: usize,
    /// node visits before stopping, `None` for no limit
    pub max_iterations: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
            epsilon: EpsilonRule::PairedStderr(2.0),
            trials: 50,
            order: VisitOrder::DegreeDescending,
            max_passes: 10,
            max_iterations: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        check_grid(&self.grid)?;
        if self.trials == 0 {
            return Err(validation(
                "local search needs at least one trial per evaluation",
            ));
        }
        let eps = match self.epsilon {
            EpsilonRule::Absolute(e)
            | EpsilonRule::IncumbentStderr(e)
            | EpsilonRule::PairedStderr(e) => e,
        };
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(validation(format!(
                "epsilon parameter {eps} must be non-negative"
            )));
        }
        Ok(())
    }
}

/// Estimate of a single-node edit, paired with the incumbent trial by trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateEstimate {
    pub estimate: RevenueEstimate,
    /// mean of candidate minus incumbent, per trial
    pub difference: f64,
    pub difference_stderr: f64,
}

/// The incumbent strategy with its per-trial revenues on a fixed tape.
pub struct SearchState<'a> {
    setup: CascadeSetup<'a>,
    strategy: PricingStrategy,
    tape: ThresholdTape,
    trials: usize,
    samples: Vec<f64>,
    /// per node, the trials in which it received at least one offer
    offered_in: Vec<Vec<u32>>,
}

/// Collects the nodes offered in one trial.
struct OfferLog(Vec<NodeId>);

impl Observer for OfferLog {
    fn offer(&mut self, _t: usize, v: NodeId, _price: f64, _pairs: &[(NodeId, NodeId)]) {
        self.0.push(v);
    }
}

impl<'a> SearchState<'a> {
    pub fn new(
        g: &'a Graph,
        seeds: &SeedSet,
        strategy: PricingStrategy,
        m: &'a BuyerModel,
        tape: ThresholdTape,
        trials: usize,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(validation("need at least one trial"));
        }
        let setup = CascadeSetup::new(g, seeds, &strategy, m)?;
        let mut state = SearchState {
            setup,
            strategy,
            tape,
            trials,
            samples: Vec::new(),
            offered_in: Vec::new(),
        };
        state.refresh();
        Ok(state)
    }

    /// Re-simulates the incumbent on the current tape.
    fn refresh(&mut self) {
        let n = self.setup.g.node_count();
        let setup = &self.setup;
        let tape = &self.tape;
        let runs: Vec<(f64, Vec<NodeId>)> = (0..self.trials as u64)
            .into_par_iter()
            .map_init(
                || Scratch::new(n),
                |scratch, trial| {
                    let mut log = OfferLog(Vec::new());
                    let revenue = setup.run(scratch, tape, trial, &mut log);
                    let mut offered = log.0;
                    offered.sort_unstable();
                    offered.dedup();
                    (revenue, offered)
                },
            )
            .collect();
        self.offered_in = vec![Vec::new(); n];
        self.samples = Vec::with_capacity(runs.len());
        for (trial, (revenue, offered)) in runs.into_iter().enumerate() {
            self.samples.push(revenue);
            for v in offered {
                self.offered_in[v].push(trial as u32);
            }
        }
    }

    pub fn strategy(&self) -> &PricingStrategy {
        &self.strategy
    }

    pub fn tape(&self) -> &ThresholdTape {
        &self.tape
    }

    pub fn incumbent(&self) -> RevenueEstimate {
        RevenueEstimate::from_samples(&self.samples)
    }

    /// Moves to a new tape and re-estimates the incumbent.
    pub fn set_tape(&mut self, tape: ThresholdTape) {
        self.tape = tape;
        self.refresh();
    }

    fn check_node(&self, node: NodeId) -> Result<()> {
        match self.strategy.prices().get(node) {
            None => Err(validation(format!("node {node} out of range"))),
            Some(None) => Err(validation(format!(
                "node {node} is a seed and cannot be repriced"
            ))),
            Some(Some(_)) => Ok(()),
        }
    }

    fn candidate_samples(&self, node: NodeId, price: f64) -> Vec<f64> {
        let mut samples = self.samples.clone();
        if self.strategy.price(node) == Some(price) {
            return samples;
        }
        let mut setup = self.setup.clone();
        setup.set_price(node, price);
        // an edit only matters in trials where the node was offered
        let mut scratch = Scratch::new(setup.g.node_count());
        for &trial in &self.offered_in[node] {
            samples[trial as usize] = setup.run(
                &mut scratch,
                &self.tape,
                trial as u64,
                &mut crate::cascade::Quiet,
            );
        }
        samples
    }

    /// Estimate of the strategy with `node` repriced, on exactly the
    /// incumbent's tape and trials.
    pub fn evaluate(&self, node: NodeId, price: f64) -> Result<CandidateEstimate> {
        self.check_node(node)?;
        if !(0.0..=1.0).contains(&price) {
            return Err(validation(format!("price {price} outside [0, 1]")));
        }
        let samples = self.candidate_samples(node, price);
        let diffs: Vec<f64> = samples
            .iter()
            .zip(&self.samples)
            .map(|(c, i)| c - i)
            .collect();
        let diff = RevenueEstimate::from_samples(&diffs);
        Ok(CandidateEstimate {
            estimate: RevenueEstimate::from_samples(&samples),
            difference: diff.mean,
            difference_stderr: diff.stderr,
        })
    }

    /// Commits a price edit and re-estimates the incumbent on the same tape.
    pub fn adopt(&mut self, node: NodeId, price: f64) -> Result<()> {
        self.check_node(node)?;
        self.strategy.set_price(node, price)?;
        self.setup.set_price(node, price);
        self.refresh();
        Ok(())
    }

    pub fn into_strategy(self) -> PricingStrategy {
        self.strategy
    }
}

/// Estimate of the incumbent with one node repriced.
pub fn evaluate_candidate(
    state: &SearchState<'_>,
    node: NodeId,
    price: f64,
) -> Result<RevenueEstimate> {
    state.evaluate(node, price).map(|c| c.estimate)
}

/// One node visit.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryEntry {
    /// 0 is the starting strategy
    pub iteration: usize,
    pub visited: Option<NodeId>,
    pub adopted: Option<(NodeId, f64)>,
    /// incumbent estimate after the visit
    pub estimate: f64,
    pub stderr: f64,
    /// improvement threshold applied at this visit
    pub epsilon: f64,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub strategy: PricingStrategy,
    pub history: Vec<HistoryEntry>,
    pub passes: usize,
}

/// Visits nodes round-robin, adopting the best grid price at each node when
/// it beats the incumbent by more than epsilon. Stops after a full pass
/// without adoption, or at the pass or iteration limit. The tape rotates
/// between passes.
pub fn local_search_improve(
    g: &Graph,
    seeds: &SeedSet,
    s0: PricingStrategy,
    m: &BuyerModel,
    cfg: &SearchConfig,
    tape: &ThresholdTape,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    let mut order: Vec<NodeId> = (0..g.node_count())
        .filter(|&v| !seeds.contains(v))
        .collect();
    if cfg.order == VisitOrder::DegreeDescending {
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    }

    let mut state = SearchState::new(g, seeds, s0, m, *tape, cfg.trials)?;
    let start = state.incumbent();
    let mut history = vec![HistoryEntry {
        iteration: 0,
        visited: None,
        adopted: None,
        estimate: start.mean,
        stderr: start.stderr,
        epsilon: 0.0,
    }];
    let limit = cfg.max_iterations.unwrap_or(usize::MAX);
    let mut passes = 0;
    'passes: for pass in 0..cfg.max_passes {
        if pass > 0 {
            state.set_tape(tape.rotated(pass as u64));
        }
        passes += 1;
        let mut adopted_any = false;
        for &v in &order {
            if history.len() > limit {
                break 'passes;
            }
            let incumbent = state.incumbent();
            let evaluations: Vec<CandidateEstimate> = cfg
                .grid
                .par_iter()
                .map(|&p| state.evaluate(v, p))
                .collect::<Result<_>>()?;
            let (best, eval) = evaluations
                .iter()
                .enumerate()
                .fold(
                    None,
                    |acc: Option<(usize, &CandidateEstimate)>, (i, e)| match acc {
                        Some((_, b)) if b.estimate.mean >= e.estimate.mean => acc,
                        _ => Some((i, e)),
                    },
                )
                .expect("grid is non-empty");
            let epsilon = match cfg.epsilon {
                EpsilonRule::Absolute(e) => e,
                EpsilonRule::IncumbentStderr(k) => k * incumbent.stderr,
                EpsilonRule::PairedStderr(k) => k * eval.difference_stderr,
            };
            let price = cfg.grid[best];
            let mut adopted = None;
            if state.strategy().price(v) != Some(price) && eval.difference > epsilon {
                state.adopt(v, price)?;
                adopted = Some((v, price));
                adopted_any = true;
            }
            let now = state.incumbent();
            history.push(HistoryEntry {
                iteration: history.len(),
                visited: Some(v),
                adopted,
                estimate: now.mean,
                stderr: now.stderr,
                epsilon,
            });
        }
        if !adopted_any {
            break;
        }
    }
    let strategy = state.into_strategy().with_provenance(Provenance::Searched);
    Ok(SearchOutcome {
        strategy,
        history,
        passes,
    })
}

/// History as CSV: `iteration,adopted_node,adopted_price,estimate,stderr`,
/// with the adoption fields empty for visits that changed nothing.
pub fn history_csv(history: &[HistoryEntry]) -> String {
    let mut out = String::from("iteration,adopted_node,adopted_price,estimate,stderr\n");
    for h in history {
        let (node, price) = match h.adopted {
            Some((v, p)) => (v.to_string(), p.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            h.iteration, node, price, h.estimate, h.stderr
        )
        .unwrap();
    }
    out
}
