//! Non-adaptive pricing strategies.

use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{validation, Error, Result};
use crate::graph::{merge_seed_set, Graph, MergedGraph, NodeId, SeedSet};
use crate::maxleaf::{approx_max_leaf_tree, SpanningTree};
use crate::model::BuyerModel;

/// Default fraction `z` of the per-node revenue paid back as cashback.
pub const DEFAULT_CASHBACK_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    MaxLeaf,
    Random,
    Uniform,
    Searched,
    Oracle,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::MaxLeaf => "maxleaf",
            Provenance::Random => "random",
            Provenance::Uniform => "uniform",
            Provenance::Searched => "searched",
            Provenance::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxleaf" => Ok(Provenance::MaxLeaf),
            "random" => Ok(Provenance::Random),
            "uniform" => Ok(Provenance::Uniform),
            "searched" => Ok(Provenance::Searched),
            "oracle" => Ok(Provenance::Oracle),
            other => Err(validation(format!("unknown strategy provenance {other:?}"))),
        }
    }
}

/// A committed price per node. Seeds hold `None`: they are active from the
/// start and never receive an offer.
#[derive(Clone, Debug, PartialEq)]
pub struct PricingStrategy {
    prices: Vec<Option<f64>>,
    cashback: f64,
    provenance: Provenance,
}

impl PricingStrategy {
    /// Wraps a full price vector; entries for seeds are discarded.
    pub fn from_prices(seeds: &SeedSet, prices: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if let Some(&bad) = prices.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(validation(format!("price {bad} outside [0, 1]")));
        }
        let n = prices.len();
        let is_seed = seeds.mask(n);
        if seeds.members().iter().any(|&s| s >= n) {
            return Err(validation("seed set does not fit the price vector"));
        }
        let prices = prices
            .into_iter()
            .zip(is_seed)
            .map(|(p, seed)| (!seed).then_some(p))
            .collect();
        Ok(PricingStrategy {
            prices,
            cashback: 0.0,
            provenance,
        })
    }

    /// Every non-seed node at the same price.
    pub fn uniform(g: &Graph, seeds: &SeedSet, price: f64) -> Result<Self> {
        Self::from_prices(seeds, vec![price; g.node_count()], Provenance::Uniform)
    }

    pub fn node_count(&self) -> usize {
        self.prices.len()
    }

    /// Committed price of `v`, `None` for seeds.
    pub fn price(&self, v: NodeId) -> Option<f64> {
        self.prices[v]
    }

    pub fn prices(&self) -> &[Option<f64>] {
        &self.prices
    }

    pub fn cashback(&self) -> f64 {
        self.cashback
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Changes the price of one non-seed node.
    pub fn set_price(&mut self, v: NodeId, price: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&price) {
            return Err(validation(format!("price {price} outside [0, 1]")));
        }
        match self.prices.get_mut(v) {
            Some(slot @ Some(_)) => {
                *slot = Some(price);
                Ok(())
            }
            Some(None) => Err(validation(format!("node {v} is a seed and takes no price"))),
            None => Err(validation(format!("node {v} out of range"))),
        }
    }

    /// Sets the cashback to `z * r0`.
    pub fn set_cashback(&mut self, z: f64, r0: f64) -> Result<()> {
        if !(0.0..1.0).contains(&z) {
            return Err(validation(format!(
                "cashback fraction z = {z} must lie in [0, 1)"
            )));
        }
        if !(r0 >= 0.0 && r0.is_finite()) {
            return Err(validation(format!(
                "per-node revenue r0 = {r0} must be non-negative"
            )));
        }
        let r = z * r0;
        self.check_cashback(r)?;
        self.cashback = r;
        Ok(())
    }

    fn check_cashback(&self, r: f64) -> Result<()> {
        if r == 0.0 {
            return Ok(());
        }
        let min_positive = self
            .prices
            .iter()
            .flatten()
            .copied()
            .filter(|&p| p > 0.0)
            .reduce(f64::min);
        match min_positive {
            Some(m) if r < m => Ok(()),
            _ => Err(validation(format!(
                "cashback {r} must stay below the smallest positive price charged"
            ))),
        }
    }

    /// Checks that the strategy prices exactly the non-seed nodes of `g`.
    pub fn validate(&self, g: &Graph, seeds: &SeedSet) -> Result<()> {
        if self.prices.len() != g.node_count() {
            return Err(validation(format!(
                "strategy covers {} nodes, graph has {}",
                self.prices.len(),
                g.node_count()
            )));
        }
        for (v, p) in self.prices.iter().enumerate() {
            match (seeds.contains(v), p) {
                (true, Some(_)) => return Err(validation(format!("seed {v} carries a price"))),
                (false, None) => return Err(validation(format!("node {v} has no price"))),
                _ => {}
            }
        }
        self.check_cashback(self.cashback)
    }

    /// `# cashback <r>` and `# provenance <tag>` headers, then one
    /// `node price` line per non-seed node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# cashback {}", self.cashback).unwrap();
        writeln!(out, "# provenance {}", self.provenance).unwrap();
        for (v, p) in self.prices.iter().enumerate() {
            if let Some(p) = p {
                writeln!(out, "{v} {p}").unwrap();
            }
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output for a graph on `n` nodes.
    /// Lines naming seeds are ignored.
    pub fn from_text(text: &str, n: usize, seeds: &SeedSet) -> Result<Self> {
        let mut prices = vec![None; n];
        let mut cashback = 0.0;
        let mut provenance = Provenance::Searched;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            if let Some(comment) = line.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                match (words.next(), words.next()) {
                    (Some("cashback"), Some(r)) => {
                        cashback = r
                            .parse()
                            .map_err(|_| parse_err(format!("bad cashback {r:?}")))?;
                    }
                    (Some("provenance"), Some(tag)) => provenance = tag.parse()?,
                    _ => {}
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [node, price] = fields.as_slice() else {
                return Err(parse_err(format!("expected `node price`, got {line:?}")));
            };
            let v: NodeId = node
                .parse()
                .map_err(|_| parse_err(format!("bad node {node:?}")))?;
            let p: f64 = price
                .parse()
                .map_err(|_| parse_err(format!("bad price {price:?}")))?;
            if v >= n {
                return Err(parse_err(format!("node {v} out of range for {n} nodes")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(parse_err(format!("price {p} outside [0, 1]")));
            }
            if !seeds.contains(v) {
                prices[v] = Some(p);
            }
        }
        if let Some(v) = (0..n).find(|&v| !seeds.contains(v) && prices[v].is_none()) {
            return Err(validation(format!(
                "strategy file has no price for node {v}"
            )));
        }
        let s = PricingStrategy {
            prices,
            cashback,
            provenance,
        };
        s.check_cashback(cashback)?;
        Ok(s)
    }
}

/// The spanning tree behind a max-leaf strategy, in original node ids.
#[derive(Clone, Debug)]
pub struct MaxLeafPlan {
    pub merged: MergedGraph,
    /// Tree over the merged graph, rooted at the merged seed.
    pub tree: SpanningTree,
}

impl MaxLeafPlan {
    pub fn new(g: &Graph, seeds: &SeedSet) -> Result<Self> {
        let merged = merge_seed_set(g, seeds)?;
        if !merged.graph.is_connected() {
            return Err(validation("graph is not connected after merging the seeds"));
        }
        let tree = approx_max_leaf_tree(&merged.graph, merged.seed)?;
        Ok(MaxLeafPlan { merged, tree })
    }

    /// Original ids of the tree leaves, ascending. The merged seed is never
    /// one of them.
    pub fn leaves(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = (0..self.merged.mapping.len())
            .filter(|&v| {
                let image = self.merged.mapping[v];
                image != self.merged.seed && self.tree.is_leaf(image)
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Interior nodes get price 0; each leaf independently gets 0 with
    /// probability `(1 + f) / 2`, otherwise `c`.
    pub fn assign(
        &self,
        seeds: &SeedSet,
        f: f64,
        c: f64,
        rng_seed: u64,
    ) -> Result<PricingStrategy> {
        if !(0.0..1.0).contains(&f) || !(c > 0.0 && c <= 1.0) {
            return Err(validation(format!(
                "max-leaf parameters f = {f}, c = {c} out of range"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let free = (1.0 + f) / 2.0;
        let mut prices = vec![0.0; self.merged.mapping.len()];
        for v in self.leaves() {
            if !rng.gen_bool(free) {
                prices[v] = c;
            }
        }
        PricingStrategy::from_prices(seeds, prices, Provenance::MaxLeaf)
    }
}

/// Influence-and-exploit pricing around an approximate max-leaf spanning
/// tree, with `f` and `c` taken from the model's complexity parameters.
pub fn build_strategy_maxleaf(
    g: &Graph,
    seeds: &SeedSet,
    model: &BuyerModel,
    rng_seed: u64,
) -> Result<PricingStrategy> {
    let k = model.complexity();
    MaxLeafPlan::new(g, seeds)?.assign(seeds, k.neighbor_fraction, k.price, rng_seed)
}

/// Independent uniform choice from `grid` for every non-seed node.
pub fn build_random_pricing(
    g: &Graph,
    seeds: &SeedSet,
    grid: &[f64],
    rng_seed: u64,
) -> Result<PricingStrategy> {
    check_grid(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let prices = (0..g.node_count())
        .map(|_| grid[rng.gen_range(0..grid.len())])
        .collect();
    PricingStrategy::from_prices(seeds, prices, Provenance::Random)
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(validation("price grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(validation(format!("grid price {bad} outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::model::{CostFunction, Derivation, ModelComplexity};

    fn linear_model() -> BuyerModel {
        BuyerModel::icm(CostFunction::linear()).unwrap()
    }

    #[test]
    fn star_leaves_are_priced_reproducibly() {
        let g = star(5);
        let seeds = SeedSet::single(&g, 0).unwrap();
        let m = linear_model();
        assert_eq!(
            (m.complexity().neighbor_fraction, m.complexity().price),
            (0.0, 0.5)
        );
        let a = build_strategy_maxleaf(&g, &seeds, &m, 42).unwrap();
        let b = build_strategy_maxleaf(&g, &seeds, &m, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.price(0), None);
        for v in 1..=5 {
            assert!(matches!(a.price(v), Some(p) if p == 0.0 || p == 0.5));
        }
        let recorded: Vec<_> = (1..=5).map(|v| a.price(v).unwrap()).collect();
        let again: Vec<_> = (1..=5).map(|v| b.price(v).unwrap()).collect();
        assert_eq!(recorded, again);
    }

    #[test]
    fn path_interior_is_free() {
        let g = path(4);
        let seeds = SeedSet::single(&g, 0).unwrap();
        let plan = MaxLeafPlan::new(&g, &seeds).unwrap();
        assert_eq!(plan.leaves(), vec![3]);
        for rng_seed in 0..20 {
            let s = plan.assign(&seeds, 0.0, 0.5, rng_seed).unwrap();
            assert_eq!((s.price(1), s.price(2)), (Some(0.0), Some(0.0)));
        }
    }

    #[test]
    fn charged_fraction_matches_binomial() {
        let g = star(4);
        let seeds = SeedSet::single(&g, 0).unwrap();
        let plan = MaxLeafPlan::new(&g, &seeds).unwrap();
        let draws = 10_000;
        let charged: usize = (0..draws)
            .map(|seed| {
                let s = plan.assign(&seeds, 0.5, 0.25, seed).unwrap();
                (1..=4).filter(|&v| s.price(v) == Some(0.25)).count()
            })
            .sum();
        let trials = (4 * draws) as f64;
        let frac = charged as f64 / trials;
        let sigma = (0.25 * 0.75 / trials).sqrt();
        assert!((frac - 0.25).abs() <= 3.0 * sigma, "{frac}");
    }

    #[test]
    fn tree_paths_to_charged_nodes_are_free() {
        let g = crate::graph::generate_preferential_attachment(200, 2, 3).unwrap();
        let seeds = SeedSet::new(&g, [5, 9]).unwrap();
        let plan = MaxLeafPlan::new(&g, &seeds).unwrap();
        let s = plan.assign(&seeds, 0.0, 0.6, 1).unwrap();
        let pre = plan.merged.preimages();
        for v in 0..g.node_count() {
            if s.price(v).unwrap_or(0.0) > 0.0 {
                let image = plan.merged.mapping[v];
                for a in plan.tree.ancestors(image) {
                    for &orig in &pre[a] {
                        assert!(s.price(orig).unwrap_or(0.0) == 0.0);
                    }
                }
            }
        }
        s.validate(&g, &seeds).unwrap();
    }

    #[test]
    fn manual_parameters_are_used() {
        let m = linear_model().with_complexity(
            ModelComplexity::new(3.0, 0.5, 0.25, 0.5, Derivation::Manual).unwrap(),
        );
        let g = star(3);
        let seeds = SeedSet::single(&g, 0).unwrap();
        let s = build_strategy_maxleaf(&g, &seeds, &m, 0).unwrap();
        assert!((1..=3).all(|v| matches!(s.price(v), Some(p) if p == 0.0 || p == 0.25)));
    }

    #[test]
    fn random_pricing() {
        let g = path(1000);
        let seeds = SeedSet::single(&g, 0).unwrap();
        let s = build_random_pricing(&g, &seeds, &[0.5], 1).unwrap();
        assert!((1..1000).all(|v| s.price(v) == Some(0.5)));

        let s = build_random_pricing(&g, &seeds, &[0.0, 1.0], 8).unwrap();
        let zeros = (1..1000).filter(|&v| s.price(v) == Some(0.0)).count() as f64 / 999.0;
        assert!((0.45..=0.55).contains(&zeros), "{zeros}");
        assert_eq!(s, build_random_pricing(&g, &seeds, &[0.0, 1.0], 8).unwrap());

        assert!(build_random_pricing(&g, &seeds, &[], 1).is_err());
    }

    #[test]
    fn cashback_rules() {
        let g = path(3);
        let seeds = SeedSet::single(&g, 0).unwrap();
        let mut s = PricingStrategy::uniform(&g, &seeds, 0.5).unwrap();
        s.set_cashback(0.0, 0.3).unwrap();
        assert_eq!(s.cashback(), 0.0);
        s.set_cashback(0.1, 0.2).unwrap();
        assert!((s.cashback() - 0.02).abs() < 1e-15);
        assert!(s.set_cashback(1.0, 0.2).is_err());

        let mut free = PricingStrategy::uniform(&g, &seeds, 0.0).unwrap();
        assert!(free.set_cashback(0.5, 0.2).is_err());
    }

    #[test]
    fn seeds_take_no_price() {
        let g = path(3);
        let seeds = SeedSet::single(&g, 1).unwrap();
        let mut s = PricingStrategy::uniform(&g, &seeds, 0.5).unwrap();
        assert!(s.set_price(1, 0.2).is_err());
        s.set_price(2, 0.2).unwrap();
        assert_eq!(s.price(2), Some(0.2));
        assert!(s.validate(&g, &SeedSet::single(&g, 0).unwrap()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = star(4);
        let seeds = SeedSet::single(&g, 0).unwrap();
        let mut s = build_random_pricing(&g, &seeds, &[0.1, 0.7], 3).unwrap();
        s.set_cashback(0.1, 0.5).unwrap();
        let text = s.to_text();
        assert!(text.starts_with("# cashback 0.05\n"));
        assert_eq!(PricingStrategy::from_text(&text, 5, &seeds).unwrap(), s);
        assert!(PricingStrategy::from_text("1 0.5\n", 5, &seeds).is_err());
        assert!(matches!(
            PricingStrategy::from_text("1 x\n", 5, &seeds),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
