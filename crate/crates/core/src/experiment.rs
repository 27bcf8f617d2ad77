//! Repeated strategy comparisons on one graph: build each strategy from a
//! random seed node, optionally improve it by local search, and average the
//! revenue curves.

use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cascade::ThresholdTape;
use crate::error::{validation, Error, Result};
use crate::graph::{Graph, NodeId, SeedSet};
use crate::model::BuyerModel;
use crate::search::{local_search_improve, HistoryEntry, SearchConfig};
use crate::strategy::{build_random_pricing, build_strategy_maxleaf, PricingStrategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    MaxLeaf,
    Random,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::MaxLeaf => "maxleaf",
            StrategyKind::Random => "random",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxleaf" => Ok(StrategyKind::MaxLeaf),
            "random" => Ok(StrategyKind::Random),
            other => Err(validation(format!(
                "unknown strategy {other:?} (expected maxleaf or random)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub strategies: Vec<StrategyKind>,
    pub repeats: usize,
    /// master seed for seed nodes, strategy draws and tapes
    pub seed: u64,
    /// fixed seed node instead of a random one per repeat
    pub seed_node: Option<NodeId>,
    /// `max_iterations = Some(0)` evaluates the starting strategies only;
    /// the grid doubles as the random-pricing menu
    pub search: SearchConfig,
}

/// One strategy on one repeat.
#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub strategy: StrategyKind,
    pub repeat: usize,
    pub seed_node: NodeId,
    pub history: Vec<HistoryEntry>,
    pub final_strategy: PricingStrategy,
}

/// Per-repeat draws, shared by every strategy in that repeat.
struct RepeatDraw {
    seed_node: NodeId,
    strategy_seed: u64,
    tape: ThresholdTape,
}

pub fn run_experiment(
    g: &Graph,
    m: &BuyerModel,
    cfg: &ExperimentConfig,
) -> Result<Vec<ExperimentRun>> {
    cfg.search.validate()?;
    if cfg.repeats == 0 || cfg.strategies.is_empty() {
        return Err(validation(
            "experiment needs at least one repeat and one strategy",
        ));
    }
    if g.node_count() < 2 {
        return Err(validation(
            "experiment needs a graph with at least two nodes",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draws: Vec<RepeatDraw> = (0..cfg.repeats)
        .map(|_| RepeatDraw {
            seed_node: rng.gen_range(0..g.node_count()),
            strategy_seed: rng.gen(),
            tape: ThresholdTape::new(rng.gen()),
        })
        .collect();

    let mut runs = Vec::new();
    for (repeat, draw) in draws.iter().enumerate() {
        let seed_node = cfg.seed_node.unwrap_or(draw.seed_node);
        let seeds = SeedSet::single(g, seed_node)?;
        for &kind in &cfg.strategies {
            let start = match kind {
                StrategyKind::MaxLeaf => build_strategy_maxleaf(g, &seeds, m, draw.strategy_seed)?,
                StrategyKind::Random => {
                    build_random_pricing(g, &seeds, &cfg.search.grid, draw.strategy_seed)?
                }
            };
            let out = local_search_improve(g, &seeds, start, m, &cfg.search, &draw.tape)?;
            runs.push(ExperimentRun {
                strategy: kind,
                repeat,
                seed_node,
                history: out.history,
                final_strategy: out.strategy,
            });
        }
    }
    Ok(runs)
}

/// One row of an averaged revenue curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub strategy: StrategyKind,
    pub iteration: usize,
    pub mean_revenue: f64,
    /// Monte Carlo standard error of the mean, propagated across repeats
    pub stderr: f64,
}

/// Averages the runs of each strategy iteration by iteration. A search that
/// stopped early keeps its final estimate for the remaining iterations.
pub fn average_curves(runs: &[ExperimentRun], strategies: &[StrategyKind]) -> Vec<CurvePoint> {
    let mut out = Vec::new();
    for &kind in strategies {
        let mine: Vec<&ExperimentRun> = runs.iter().filter(|r| r.strategy == kind).collect();
        let Some(len) = mine.iter().map(|r| r.history.len()).max() else {
            continue;
        };
        let r = mine.len() as f64;
        for iteration in 0..len {
            let at =
                |run: &&ExperimentRun| run.history[iteration.min(run.history.len() - 1)].clone();
            let mean = mine.iter().map(|run| at(run).estimate).sum::<f64>() / r;
            let var = mine.iter().map(|run| at(run).stderr.powi(2)).sum::<f64>();
            out.push(CurvePoint {
                strategy: kind,
                iteration,
                mean_revenue: mean,
                stderr: var.sqrt() / r,
            });
        }
    }
    out
}

/// `strategy,iteration,mean_revenue,stderr` with a header line.
pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("strategy,iteration,mean_revenue,stderr\n");
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            p.strategy, p.iteration, p.mean_revenue, p.stderr
        )
        .unwrap();
    }
    out
}
