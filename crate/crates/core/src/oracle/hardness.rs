use std::fmt::{self, Write as _};

use super::optimal_restricted;
use crate::cascade::exact_expected_revenue;
use crate::error::{validation, Error, Result};
use crate::graph::{Graph, NodeId, SeedSet};
use crate::model::{BuyerModel, CostFunction};
use crate::strategy::{PricingStrategy, Provenance};

/// Largest source graph whose optimal free set is found by enumeration.
pub const BRUTE_FORCE_MAX_SOURCE_VERTICES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Seed,
    /// one node per source vertex
    Vertex,
    /// one node per source edge
    Edge,
    /// pendants hanging off edge nodes
    Pendant,
}

impl Layer {
    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Seed => "s",
            Layer::Vertex => "V1",
            Layer::Edge => "V2",
            Layer::Pendant => "V3",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A pricing instance built from a bounded-degree vertex-cover instance.
///
/// Node 0 is the seed, followed by the vertex layer (in source order), the
/// edge layer (in the source's edge order) and `k` pendants per edge node.
#[derive(Clone, Debug)]
pub struct HardnessInstance {
    pub graph: Graph,
    pub seeds: SeedSet,
    pub source: Graph,
    pub d: usize,
    pub k: usize,
    /// `1 / (4d)`
    pub p: f64,
    pub layers: Vec<Layer>,
    /// node of each source vertex
    pub vertex_nodes: Vec<NodeId>,
    /// node of each source edge, with the edge
    pub edge_nodes: Vec<(NodeId, (NodeId, NodeId))>,
    /// accepts full price with probability `p`
    pub model: BuyerModel,
}

impl HardnessInstance {
    pub fn pendant_count(&self) -> usize {
        self.edge_nodes.len() * self.k
    }

    /// Edge nodes and the free set free, everything else at full price.
    pub fn strategy_for(&self, free_set: &[NodeId]) -> Result<PricingStrategy> {
        let mut prices: Vec<f64> = self
            .layers
            .iter()
            .map(|l| if *l == Layer::Edge { 0.0 } else { 1.0 })
            .collect();
        for &u in free_set {
            let v = *self
                .vertex_nodes
                .get(u)
                .ok_or_else(|| validation(format!("source vertex {u} out of range")))?;
            prices[v] = 0.0;
        }
        PricingStrategy::from_prices(&self.seeds, prices, Provenance::Oracle)
    }

    /// Exact expected revenue of [`Self::strategy_for`] by the cascade oracle.
    pub fn exact_revenue(&self, free_set: &[NodeId]) -> Result<f64> {
        exact_expected_revenue(
            &self.graph,
            &self.seeds,
            &self.strategy_for(free_set)?,
            &self.model,
        )
    }

    pub fn covers(&self, free_set: &[NodeId]) -> bool {
        self.source
            .edges()
            .all(|(u, v)| free_set.contains(&u) || free_set.contains(&v))
    }
}

/// Builds the reduction of `source` with degree bound `d`. `k` defaults to
/// `20d` pendants per edge node.
pub fn build_hardness_instance(
    source: &Graph,
    d: usize,
    k: Option<usize>,
) -> Result<HardnessInstance> {
    if d == 0 {
        return Err(validation("degree bound must be at least 1"));
    }
    if source.max_degree() > d {
        return Err(validation(format!(
            "source graph has a vertex of degree {} above the bound {d}",
            source.max_degree()
        )));
    }
    let k = k.unwrap_or(20 * d);
    let p = 1.0 / (4 * d) as f64;
    let n = source.node_count();
    let source_edges: Vec<(NodeId, NodeId)> = source.edges().collect();
    let total = 1 + n + source_edges.len() * (1 + k);

    let mut layers = vec![Layer::Seed];
    layers.extend(std::iter::repeat_n(Layer::Vertex, n));
    layers.extend(std::iter::repeat_n(Layer::Edge, source_edges.len()));
    layers.extend(std::iter::repeat_n(Layer::Pendant, source_edges.len() * k));

    let vertex_nodes: Vec<NodeId> = (1..=n).collect();
    let mut edges: Vec<(NodeId, NodeId)> = vertex_nodes.iter().map(|&v| (0, v)).collect();
    let mut edge_nodes = Vec::with_capacity(source_edges.len());
    for (i, &(u, v)) in source_edges.iter().enumerate() {
        let e = 1 + n + i;
        edges.push((e, vertex_nodes[u]));
        edges.push((e, vertex_nodes[v]));
        let first = 1 + n + source_edges.len() + i * k;
        edges.extend((first..first + k).map(|w| (e, w)));
        edge_nodes.push((e, (u, v)));
    }
    let graph = Graph::from_edges(total, edges)?;
    let seeds = SeedSet::single(&graph, 0)?;
    Ok(HardnessInstance {
        graph,
        seeds,
        source: source.clone(),
        d,
        k,
        p,
        layers,
        vertex_nodes,
        edge_nodes,
        model: BuyerModel::icm(CostFunction::two_price(p)?)?,
    })
}

/// Closed-form expected revenue when the edge layer and the source vertices
/// in `free_set` are free and everything else is at full price.
///
/// A charged vertex node hears once from the seed and once from each of its
/// edge nodes, so it contributes `1 - (1 - p)^(deg + 1)`; each pendant hears
/// exactly once. On a `d`-regular source this is
/// `(|V1| - |C|)(1 - (1 - p)^(d + 1)) + p |V3|`.
pub fn hardness_expected_revenue(inst: &HardnessInstance, free_set: &[NodeId]) -> Result<f64> {
    if let Some(&u) = free_set.iter().find(|&&u| u >= inst.source.node_count()) {
        return Err(validation(format!("source vertex {u} out of range")));
    }
    if !inst.covers(free_set) {
        return Err(validation("free set does not cover every source edge"));
    }
    let q = 1.0 - inst.p;
    let charged: f64 = (0..inst.source.node_count())
        .filter(|u| !free_set.contains(u))
        .map(|u| 1.0 - q.powi(inst.source.degree(u) as i32 + 1))
        .sum();
    Ok(charged + inst.p * inst.pendant_count() as f64)
}

/// Checks of the reduction's numeric claims on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct HardnessReport {
    /// `2 + 2kdp^2 = 4.5`, in exact integer arithmetic
    pub bound_identity: bool,
    /// `kp = 5`, in exact integer arithmetic
    pub pendant_identity: bool,
    /// `None` when the source is too large to enumerate
    pub min_cover_size: Option<usize>,
    /// best free subset of the vertex layer, edge layer free and pendants
    /// at full price
    pub best_free_set: Option<Vec<NodeId>>,
    pub best_revenue: Option<f64>,
    pub best_is_min_cover: Option<bool>,
    /// closed form minus exact value at the best free set, when it covers
    pub formula_error: Option<f64>,
}

impl HardnessReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.bound_identity
            && self.pendant_identity
            && self.best_is_min_cover != Some(false)
            && self.formula_error.is_none_or(|e| e.abs() <= tolerance)
    }
}

pub fn verify_hardness_structure(inst: &HardnessInstance) -> Result<HardnessReport> {
    let (d, k) = (inst.d, inst.k);
    // p = 1/(4d): 2 + 2kd/(16d^2) = 9/2 and k/(4d) = 5
    let bound_identity = 2 * (16 * d + k) == 9 * 8 * d;
    let pendant_identity = k == 5 * 4 * d;
    let mut report = HardnessReport {
        bound_identity,
        pendant_identity,
        min_cover_size: None,
        best_free_set: None,
        best_revenue: None,
        best_is_min_cover: None,
        formula_error: None,
    };
    if inst.source.node_count() > BRUTE_FORCE_MAX_SOURCE_VERTICES {
        return Ok(report);
    }
    let base = inst.strategy_for(&[])?;
    let best = optimal_restricted(
        &inst.graph,
        &inst.seeds,
        &inst.model,
        &base,
        &inst.vertex_nodes,
        &[0.0, 1.0],
    );
    let (strategy, revenue) = match best {
        Ok(found) => found,
        Err(Error::Budget(_)) => return Ok(report),
        Err(e) => return Err(e),
    };
    let free: Vec<NodeId> = (0..inst.source.node_count())
        .filter(|&u| strategy.price(inst.vertex_nodes[u]) == Some(0.0))
        .collect();
    let min_cover = minimum_vertex_cover_size(&inst.source);
    report.best_is_min_cover = Some(inst.covers(&free) && free.len() == min_cover);
    if inst.covers(&free) {
        report.formula_error = Some(hardness_expected_revenue(inst, &free)? - revenue);
    }
    report.min_cover_size = Some(min_cover);
    report.best_free_set = Some(free);
    report.best_revenue = Some(revenue);
    Ok(report)
}

/// Size of a minimum vertex cover, by enumerating subsets.
pub(crate) fn minimum_vertex_cover_size(g: &Graph) -> usize {
    let n = g.node_count();
    assert!(n < 32, "enumeration only for tiny graphs");
    (0u32..1 << n)
        .filter(|set| g.edges().all(|(u, v)| set & (1 << u | 1 << v) != 0))
        .map(u32::count_ones)
        .min()
        .unwrap_or(0) as usize
}

/// Sidecar listing every node with its layer, one `node layer` pair per line.
pub fn layer_sidecar(inst: &HardnessInstance) -> String {
    let mut out = String::new();
    for (v, layer) in inst.layers.iter().enumerate() {
        writeln!(out, "{v} {layer}").unwrap();
    }
    out
}
