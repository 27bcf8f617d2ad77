//! Buyer decision models: price-aware independent cascade and linear
//! threshold, with their complexity parameters.

mod complexity;
mod config;
mod function;

pub use complexity::{icm_complexity, ltm_complexity, Derivation, ModelComplexity};
pub use config::{parse_model_config, read_model_config};
pub use function::{
    icm_accept_probability, line_revenue, ltm_accept, CostFunction, InfluenceFunction, LineRevenue,
    GRID_RESOLUTION,
};

pub(crate) use function::accept_probability_unchecked;

use std::fmt;

use crate::error::Result;

/// Step values of the default experiment cost function.
pub const DEFAULT_STEP_VALUES: [f64; 4] = [1.0, 0.2, 0.05, 0.0];

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Icm(CostFunction),
    Ltm(InfluenceFunction),
}

/// A buyer decision rule together with its complexity parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct BuyerModel {
    kind: ModelKind,
    complexity: ModelComplexity,
}

impl BuyerModel {
    pub fn icm(cost: CostFunction) -> Result<Self> {
        let complexity = icm_complexity(&cost)?;
        Ok(BuyerModel {
            kind: ModelKind::Icm(cost),
            complexity,
        })
    }

    pub fn ltm(influence: InfluenceFunction) -> Result<Self> {
        let complexity = ltm_complexity(&influence)?;
        Ok(BuyerModel {
            kind: ModelKind::Ltm(influence),
            complexity,
        })
    }

    /// Regular 4-step cascade cost used by the experiments.
    pub fn default_experiment() -> Self {
        Self::icm(CostFunction::regular_steps(&DEFAULT_STEP_VALUES).unwrap()).unwrap()
    }

    /// Cascade model that accepts any positive price with probability 1/2.
    pub fn accept_half() -> Self {
        Self::icm(CostFunction::regular_steps(&[1.0, 0.0]).unwrap()).unwrap()
    }

    /// Replaces the derived complexity parameters.
    pub fn with_complexity(mut self, complexity: ModelComplexity) -> Self {
        self.complexity = complexity;
        self
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn complexity(&self) -> &ModelComplexity {
        &self.complexity
    }

    pub fn is_icm(&self) -> bool {
        matches!(self.kind, ModelKind::Icm(_))
    }

    /// Per-recommendation acceptance probability for cascade models; `None`
    /// for threshold models.
    pub fn accept_probability(&self, price: f64) -> Option<f64> {
        match &self.kind {
            ModelKind::Icm(cost) => Some(accept_probability_unchecked(cost, price)),
            ModelKind::Ltm(_) => None,
        }
    }
}

impl fmt::Display for BuyerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ModelKind::Icm(c) => write!(f, "icm[{c}]"),
            ModelKind::Ltm(b) => write!(f, "ltm[{b}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_models() {
        let half = BuyerModel::accept_half();
        assert_eq!(half.accept_probability(1.0), Some(0.5));
        assert_eq!(half.accept_probability(0.3), Some(0.5));
        assert_eq!(half.accept_probability(0.0), Some(1.0));

        let default = BuyerModel::default_experiment();
        assert!(default.is_icm());
        assert!(default.complexity().value.is_finite());

        let ltm = BuyerModel::ltm(InfluenceFunction::linear()).unwrap();
        assert_eq!(ltm.accept_probability(0.5), None);
    }
}
