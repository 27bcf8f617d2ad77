use super::function::{CostFunction, InfluenceFunction};
use crate::error::{Error, Result};

/// How the complexity parameters were obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Derivation {
    /// Slope recipe for cascade costs: `C(x) >= 1 - m x` for `x <= eps` and
    /// `C(x) <= m (1 - x)` for `x >= 1 - eps`, checked on the grid.
    Slope { epsilon: f64, slope: f64 },
    /// Threshold models: peak of `x * B(x)`.
    PeakInfluence { peak: f64 },
    /// Parameters supplied by configuration.
    Manual,
}

/// Parameters `(L, f, c, q)` of a buyer model and its complexity
/// `K = L / ((1 - f) c q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelComplexity {
    /// Bound on revenue from a line whose two endpoints are seeds.
    pub line_bound: f64,
    /// Neighbor fraction `f` in `[0, 1)`.
    pub neighbor_fraction: f64,
    /// Price `c` in `(0, 1]`.
    pub price: f64,
    /// Purchase probability `q` in `(0, 1]` at price `c` once more than a
    /// fraction `f` of neighbors recommend.
    pub probability: f64,
    pub value: f64,
    pub derivation: Derivation,
}

impl ModelComplexity {
    pub fn new(
        line_bound: f64,
        neighbor_fraction: f64,
        price: f64,
        probability: f64,
        derivation: Derivation,
    ) -> Result<Self> {
        let ok = line_bound > 0.0
            && (0.0..1.0).contains(&neighbor_fraction)
            && price > 0.0
            && price <= 1.0
            && probability > 0.0
            && probability <= 1.0;
        if !ok {
            return Err(Error::ModelDegenerate(format!(
                "invalid complexity parameters L={line_bound} f={neighbor_fraction} \
                 c={price} q={probability}"
            )));
        }
        let value = line_bound / ((1.0 - neighbor_fraction) * price * probability);
        Ok(ModelComplexity {
            line_bound,
            neighbor_fraction,
            price,
            probability,
            value,
            derivation,
        })
    }
}

/// Complexity of the cascade model with cost `C`, following the slope
/// recipe: `f = 0`, `q = min(eps, 1/(2m))`, `c = C(q)`, and
/// `L = min(max_x 2x C(x)/(1-x), 2 max(1/eps, m))`.
///
/// `eps` and `m` are chosen on the grid to minimize `max(1/eps, m)`.
pub fn icm_complexity(cost: &CostFunction) -> Result<ModelComplexity> {
    let grid = cost.grid();
    let costs: Vec<f64> = grid.iter().map(|&x| cost.cost(x)).collect();

    let mut best: Option<(f64, f64, f64)> = None; // (objective, eps, m)
    for (j, &eps) in grid.iter().enumerate() {
        if eps <= 0.0 {
            continue;
        }
        let near_zero = grid[..=j]
            .iter()
            .zip(&costs)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &c)| (1.0 - c) / x)
            .fold(0.0, f64::max);
        let near_one = grid
            .iter()
            .zip(&costs)
            .filter(|(&x, _)| x >= 1.0 - eps - 1e-12 && x < 1.0)
            .map(|(&x, &c)| c / (1.0 - x))
            .fold(0.0, f64::max);
        let slope = near_zero.max(near_one);
        let objective = (1.0 / eps).max(slope);
        // ties go to the larger eps
        if best.is_none_or(|(o, _, _)| objective <= o) {
            best = Some((objective, eps, slope));
        }
    }
    let (objective, epsilon, slope) =
        best.ok_or_else(|| Error::ModelDegenerate("empty evaluation grid".into()))?;

    let target = if slope > 0.0 {
        epsilon.min(1.0 / (2.0 * slope))
    } else {
        epsilon
    };
    // snap to the grid so rounding in the slope does not leak into q and c
    let mut q = grid
        .iter()
        .copied()
        .rfind(|&x| x > 0.0 && x <= target + 1e-9)
        .unwrap_or(target);
    if cost.cost(q) < 0.5 {
        q = grid
            .iter()
            .copied()
            .rfind(|&x| x > 0.0 && x <= q && cost.cost(x) >= 0.5)
            .ok_or_else(|| {
                Error::ModelDegenerate(format!(
                    "no acceptance probability q with C(q) >= 1/2 for {cost}"
                ))
            })?;
    }
    let price = cost.cost(q);

    let grid_bound = grid
        .iter()
        .zip(&costs)
        .filter(|(&x, _)| x < 1.0)
        .map(|(&x, &c)| 2.0 * x * c / (1.0 - x))
        .fold(0.0, f64::max);
    let line_bound = grid_bound.min(2.0 * objective);
    if line_bound <= 0.0 {
        return Err(Error::ModelDegenerate(format!(
            "no price yields revenue under {cost}"
        )));
    }
    ModelComplexity::new(
        line_bound,
        0.0,
        price,
        q,
        Derivation::Slope { epsilon, slope },
    )
}

/// Complexity of the threshold model with influence `B`.
///
/// With `K_B = max_x x B(x)` attained at `c`, we use `f = 1/2` and
/// `q = B(c)/2` (a node with at least half its neighbors recommending buys
/// at `c` with probability at least `B(c)/2`). On a line each sale at a
/// positive price happens with probability at most 1/2, so each seeded side
/// yields at most a geometric series summing to 1; the node where the two
/// sides meet adds at most 1 more, giving `L = 3` and `K = 12 / K_B`.
pub fn ltm_complexity(influence: &InfluenceFunction) -> Result<ModelComplexity> {
    let (peak, argmax) = influence
        .grid()
        .into_iter()
        .map(|x| (x * influence.influence(x), x))
        .fold(
            (0.0, 0.0),
            |best, cand| if cand.0 > best.0 { cand } else { best },
        );
    if peak <= 0.0 || influence.is_identically_zero() {
        return Err(Error::ModelDegenerate(format!(
            "influence function {influence} yields no revenue at any price"
        )));
    }
    let q = influence.influence(argmax) / 2.0;
    ModelComplexity::new(3.0, 0.5, argmax, q, Derivation::PeakInfluence { peak })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::function::{icm_accept_probability, line_revenue};

    #[test]
    fn linear_cost_recipe() {
        let k = icm_complexity(&CostFunction::linear()).unwrap();
        assert_eq!(k.neighbor_fraction, 0.0);
        assert_eq!((k.probability, k.price), (0.5, 0.5));
        let Derivation::Slope { epsilon, slope } = k.derivation else {
            panic!()
        };
        assert!((epsilon - 1.0).abs() < 1e-12);
        assert!((slope - 1.0).abs() < 1e-9);
        assert!(k.value.is_finite());
        assert!(k.value <= 8.0 * (1.0 / epsilon).max(slope).powi(2) + 1e-9);
    }

    #[test]
    fn four_step_cost_is_finite() {
        let c = CostFunction::regular_steps(&[1.0, 0.75, 0.5, 0.25]).unwrap();
        let k = icm_complexity(&c).unwrap();
        assert!(k.value.is_finite() && k.value >= 1.0, "{k:?}");
        assert!(k.price >= 0.5);
    }

    #[test]
    fn zero_cost_is_degenerate() {
        let c = CostFunction::piecewise_linear(vec![(0.0, 1.0), (0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert!(matches!(icm_complexity(&c), Err(Error::ModelDegenerate(_))));
    }

    #[test]
    fn condition_five_holds_for_icm() {
        for c in [
            CostFunction::linear(),
            CostFunction::regular_steps(&[1.0, 0.75, 0.5, 0.25]).unwrap(),
            CostFunction::regular_steps(&[1.0, 0.8, 0.6, 0.0]).unwrap(),
            CostFunction::two_price(0.125).unwrap(),
            CostFunction::piecewise_linear(vec![(0.0, 1.0), (0.3, 0.9), (0.8, 0.2), (1.0, 0.0)])
                .unwrap(),
        ] {
            let k = icm_complexity(&c).unwrap();
            let p = icm_accept_probability(&c, k.price).unwrap();
            assert!(p >= k.probability - 1e-12, "{c}: p={p} q={}", k.probability);
            let grid = c.grid();
            for n in 0..=50 {
                let ln = line_revenue(&c, n, &grid).unwrap().value;
                assert!(
                    2.0 * ln <= k.line_bound + 1e-9,
                    "{c}: 2 L_{n} = {} > {}",
                    2.0 * ln,
                    k.line_bound
                );
            }
        }
    }

    #[test]
    fn ltm_peaks() {
        let k = ltm_complexity(&InfluenceFunction::linear()).unwrap();
        let Derivation::PeakInfluence { peak } = k.derivation else {
            panic!()
        };
        assert!((peak - 0.25).abs() < 1e-12);
        assert!((k.price - 0.5).abs() < 1e-12);
        assert!((k.value - 12.0 / 0.25).abs() < 1e-9);

        let k = ltm_complexity(&InfluenceFunction::constant(1.0).unwrap()).unwrap();
        let Derivation::PeakInfluence { peak } = k.derivation else {
            panic!()
        };
        assert_eq!(peak, 1.0);
        assert_eq!(k.price, 1.0);

        assert!(matches!(
            ltm_complexity(&InfluenceFunction::constant(0.0).unwrap()),
            Err(Error::ModelDegenerate(_))
        ));
    }

    #[test]
    fn manual_parameters_validated() {
        assert!(ModelComplexity::new(2.0, 1.0, 0.5, 0.5, Derivation::Manual).is_err());
        assert!(ModelComplexity::new(2.0, 0.0, 0.0, 0.5, Derivation::Manual).is_err());
        let k = ModelComplexity::new(2.0, 0.5, 0.5, 0.5, Derivation::Manual).unwrap();
        assert_eq!(k.value, 16.0);
    }
}
