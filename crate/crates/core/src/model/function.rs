use std::fmt;

use crate::error::{validation, Error, Result};

/// Resolution of the uniform part of every evaluation grid.
pub const GRID_RESOLUTION: usize = 1000;

/// Piecewise-linear function on `[0, 1]` given by sorted breakpoints.
///
/// Two breakpoints may share an abscissa to encode a jump; at a jump the
/// value is that of the last breakpoint with that abscissa, which makes
/// regular step functions left-closed.
#[derive(Clone, Debug, PartialEq)]
struct Breakpoints {
    points: Vec<(f64, f64)>,
}

impl Breakpoints {
    fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(validation("need at least two breakpoints"));
        }
        for &(x, y) in &points {
            if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
                return Err(validation(format!("breakpoint ({x}, {y}) outside [0,1]^2")));
            }
        }
        if points.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(validation("breakpoint abscissae must be non-decreasing"));
        }
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return Err(validation("breakpoints must span x = 0 to x = 1"));
        }
        Ok(Breakpoints { points })
    }

    fn value_at(&self, x: f64) -> f64 {
        let pts = &self.points;
        // index of the first breakpoint strictly right of x
        let right = pts.partition_point(|&(px, _)| px <= x);
        if right == 0 {
            return pts[0].1;
        }
        let (x0, y0) = pts[right - 1];
        if x0 == x || right == pts.len() {
            return y0;
        }
        let (x1, y1) = pts[right];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    fn grid(&self) -> Vec<f64> {
        let mut grid: Vec<f64> = (0..=GRID_RESOLUTION)
            .map(|i| i as f64 / GRID_RESOLUTION as f64)
            .chain(self.knots())
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }
}

/// The cost function `C: [0,1] -> [0,1]` of the independent-cascade buyer:
/// a recommendation at price `C(x)` is accepted with probability `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostFunction {
    curve: Breakpoints,
    label: String,
}

impl CostFunction {
    /// General piecewise-linear cost. Requires `C(0) = 1`, `C(1) = 0`, and a
    /// non-increasing curve.
    pub fn piecewise_linear(points: Vec<(f64, f64)>) -> Result<Self> {
        let label = format!("piecewise-linear({} points)", points.len());
        Self::from_curve(Breakpoints::new(points)?, label)
    }

    /// `C(x) = values[i]` on `[i/n, (i+1)/n)` and `C(1) = 0`.
    pub fn regular_steps(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(validation("step function needs at least one step"));
        }
        let n = values.len() as f64;
        let mut points = Vec::with_capacity(2 * values.len() + 1);
        for (i, &v) in values.iter().enumerate() {
            points.push((i as f64 / n, v));
            points.push(((i + 1) as f64 / n, v));
        }
        points.push((1.0, 0.0));
        let label = format!(
            "steps({})",
            values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        Self::from_curve(Breakpoints::new(points)?, label)
    }

    /// `C(x) = 1 - x`.
    pub fn linear() -> Self {
        Self::from_curve(
            Breakpoints::new(vec![(0.0, 1.0), (1.0, 0.0)]).unwrap(),
            "1 - x".into(),
        )
        .unwrap()
    }

    /// `C(x) = 1` for `x < p`, `0` otherwise: full price is accepted with
    /// probability `p`, anything cheaper with the same probability.
    pub fn two_price(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(validation(format!(
                "two-price threshold {p} must lie in (0, 1)"
            )));
        }
        let mut cost = Self::piecewise_linear(vec![(0.0, 1.0), (p, 1.0), (p, 0.0), (1.0, 0.0)])?;
        cost.label = format!("two-price(p = {p})");
        Ok(cost)
    }

    fn from_curve(curve: Breakpoints, label: String) -> Result<Self> {
        if curve.points[0].1 != 1.0 {
            return Err(validation("cost function must satisfy C(0) = 1"));
        }
        if curve.value_at(1.0) != 0.0 {
            return Err(validation("cost function must satisfy C(1) = 0"));
        }
        if curve.points.windows(2).any(|w| w[1].1 > w[0].1) {
            return Err(validation("cost function must be non-increasing"));
        }
        Ok(CostFunction { curve, label })
    }

    /// `C(x)`.
    pub fn cost(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            self.curve.value_at(x.min(1.0))
        }
    }

    /// Sorted evaluation grid: a uniform grid refined with every breakpoint.
    pub fn grid(&self) -> Vec<f64> {
        self.curve.grid()
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.curve.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Display for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Acceptance probability of one recommendation at `price`:
/// `sup { x : C(x) >= price }`, and exactly 1 for a free offer.
pub fn icm_accept_probability(cost: &CostFunction, price: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&price) {
        return Err(validation(format!("price {price} outside [0, 1]")));
    }
    Ok(accept_probability_unchecked(cost, price))
}

pub(crate) fn accept_probability_unchecked(cost: &CostFunction, price: f64) -> f64 {
    if price <= 0.0 {
        return 1.0;
    }
    let pts = &cost.curve.points;
    let mut best = 0.0;
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y1 >= price {
            best = x1;
            continue;
        }
        if x1 > x0 && y0 >= price {
            best = x0 + (y0 - price) / (y0 - y1) * (x1 - x0);
        }
        break;
    }
    best
}

/// The max-influence function `B` of the linear-threshold buyer.
#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceFunction {
    curve: Breakpoints,
    label: String,
}

impl InfluenceFunction {
    pub fn piecewise_linear(points: Vec<(f64, f64)>) -> Result<Self> {
        let label = format!("piecewise-linear({} points)", points.len());
        Ok(InfluenceFunction {
            curve: Breakpoints::new(points)?,
            label,
        })
    }

    /// `B(x) = 1 - x`.
    pub fn linear() -> Self {
        InfluenceFunction {
            curve: Breakpoints::new(vec![(0.0, 1.0), (1.0, 0.0)]).unwrap(),
            label: "1 - x".into(),
        }
    }

    pub fn constant(value: f64) -> Result<Self> {
        Ok(InfluenceFunction {
            curve: Breakpoints::new(vec![(0.0, value), (1.0, value)])?,
            label: format!("constant({value})"),
        })
    }

    /// `B(x)` for `x` in `(0, 1]`.
    pub fn influence(&self, x: f64) -> f64 {
        self.curve.value_at(x.clamp(0.0, 1.0))
    }

    /// Evaluation grid restricted to positive prices.
    pub fn grid(&self) -> Vec<f64> {
        self.curve.grid().into_iter().filter(|&x| x > 0.0).collect()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.curve
            .points
            .windows(2)
            .filter(|w| w[1].0 > w[0].0)
            .all(|w| w[0].1 == 0.0 && w[1].1 == 0.0)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.curve.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Display for InfluenceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Linear-threshold decision: free offers always succeed, otherwise the node
/// buys iff `theta <= alpha * B(price)`.
pub fn ltm_accept(influence: &InfluenceFunction, price: f64, alpha: f64, theta: f64) -> bool {
    price <= 0.0 || theta <= alpha * influence.influence(price)
}

/// Optimum of the single-seed line recurrence `L_n = max_x x (C(x) + L_{n-1})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineRevenue {
    pub value: f64,
    /// Maximizing acceptance probability at the last stage (0 when `n = 0`).
    pub argmax: f64,
}

/// Evaluates the line recurrence with `L_0 = 0`, maximizing over `grid`.
pub fn line_revenue(cost: &CostFunction, n: usize, grid: &[f64]) -> Result<LineRevenue> {
    if grid.is_empty() {
        return Err(validation("price-probability grid is empty"));
    }
    if let Some(&bad) = grid.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Validation(format!(
            "grid value {bad} outside [0, 1]"
        )));
    }
    let costs: Vec<f64> = grid.iter().map(|&x| cost.cost(x)).collect();
    let mut current = LineRevenue {
        value: 0.0,
        argmax: 0.0,
    };
    for _ in 0..n {
        let prev = current.value;
        let mut best = LineRevenue {
            value: f64::NEG_INFINITY,
            argmax: 0.0,
        };
        for (&x, &c) in grid.iter().zip(&costs) {
            let v = x * (c + prev);
            if v > best.value {
                best = LineRevenue {
                    value: v,
                    argmax: x,
                };
            }
        }
        current = best;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::*;
    use proptest::prelude::*;

    mod approx_eq {
        pub fn close(a: f64, b: f64) -> bool {
            (a - b).abs() < 1e-9
        }
    }

    fn four_step() -> CostFunction {
        CostFunction::regular_steps(&[1.0, 0.75, 0.5, 0.25]).unwrap()
    }

    #[test]
    fn linear_cost_inverse() {
        let c = CostFunction::linear();
        assert_eq!(icm_accept_probability(&c, 0.0).unwrap(), 1.0);
        assert!(close(icm_accept_probability(&c, 0.5).unwrap(), 0.5));
        assert!(close(icm_accept_probability(&c, 1.0).unwrap(), 0.0));
    }

    #[test]
    fn four_step_cost_inverse() {
        let c = four_step();
        assert_eq!(icm_accept_probability(&c, 0.6).unwrap(), 0.5);
        assert_eq!(icm_accept_probability(&c, 1.0).unwrap(), 0.25);
        assert_eq!(icm_accept_probability(&c, 0.75).unwrap(), 0.5);
        assert_eq!(icm_accept_probability(&c, 0.3).unwrap(), 0.75);
        assert_eq!(c.cost(0.0), 1.0);
        assert_eq!(c.cost(0.25), 0.75);
        assert_eq!(c.cost(0.2), 1.0);
        assert_eq!(c.cost(1.0), 0.0);
    }

    #[test]
    fn price_outside_unit_interval_rejected() {
        let c = CostFunction::linear();
        assert!(icm_accept_probability(&c, -0.1).is_err());
        assert!(icm_accept_probability(&c, 1.5).is_err());
    }

    #[test]
    fn cost_invariants_enforced() {
        assert!(CostFunction::piecewise_linear(vec![(0.0, 0.9), (1.0, 0.0)]).is_err());
        assert!(CostFunction::piecewise_linear(vec![(0.0, 1.0), (1.0, 0.2)]).is_err());
        assert!(CostFunction::piecewise_linear(vec![
            (0.0, 1.0),
            (0.5, 0.2),
            (0.7, 0.4),
            (1.0, 0.0)
        ])
        .is_err());
        assert!(CostFunction::regular_steps(&[0.9, 0.5]).is_err());
        assert!(CostFunction::regular_steps(&[]).is_err());
    }

    #[test]
    fn two_price_threshold() {
        let c = CostFunction::two_price(0.125).unwrap();
        assert_eq!(icm_accept_probability(&c, 1.0).unwrap(), 0.125);
        assert_eq!(icm_accept_probability(&c, 0.01).unwrap(), 0.125);
        assert_eq!(c.cost(0.125), 0.0);
        assert_eq!(c.cost(0.1), 1.0);
    }

    #[test]
    fn ltm_examples() {
        let b = InfluenceFunction::linear();
        assert!(ltm_accept(&b, 0.0, 0.0, 0.9));
        assert!(ltm_accept(&b, 0.5, 1.0, 0.4));
        assert!(!ltm_accept(&b, 0.5, 0.5, 0.4));
    }

    #[test]
    fn influence_zero_detection() {
        assert!(InfluenceFunction::constant(0.0)
            .unwrap()
            .is_identically_zero());
        assert!(!InfluenceFunction::linear().is_identically_zero());
        // a nonzero value at price 0 alone does not count
        assert!(
            InfluenceFunction::piecewise_linear(vec![(0.0, 1.0), (0.0, 0.0), (1.0, 0.0)])
                .unwrap()
                .is_identically_zero()
        );
    }

    #[test]
    fn line_revenue_examples() {
        let c = CostFunction::linear();
        let grid = c.grid();
        assert_eq!(line_revenue(&c, 0, &grid).unwrap().value, 0.0);

        // Grid search oracle for n=1 and n=2, computed independently.
        let brute = |extra: f64| {
            (0..=100_000)
                .map(|i| i as f64 / 100_000.0)
                .map(|x| (x * (1.0 - x + extra), x))
                .fold((f64::MIN, 0.0), |a, b| if b.0 > a.0 { b } else { a })
        };
        let (v1, x1) = brute(0.0);
        let (v2, x2) = brute(v1);
        assert!(close(v1, 0.25) && close(x1, 0.5));
        assert!(close(v2, 0.390625) && close(x2, 0.625));

        let l1 = line_revenue(&c, 1, &grid).unwrap();
        assert!(close(l1.value, 0.25) && close(l1.argmax, 0.5));
        let l2 = line_revenue(&c, 2, &grid).unwrap();
        assert!(close(l2.value, 0.390625) && close(l2.argmax, 0.625));
    }

    #[test]
    fn line_revenue_rejects_empty_grid() {
        assert!(line_revenue(&CostFunction::linear(), 3, &[]).is_err());
    }

    fn cost_strategy() -> impl Strategy<Value = CostFunction> {
        prop_oneof![
            proptest::collection::vec(0.0f64..=1.0, 1..8).prop_map(|mut v| {
                v.sort_by(|a, b| b.total_cmp(a));
                v[0] = 1.0;
                CostFunction::regular_steps(&v).unwrap()
            }),
            proptest::collection::vec((0.0f64..1.0, 0.0f64..=1.0), 0..6).prop_map(|raw| {
                let mut xs: Vec<f64> = raw.iter().map(|r| r.0).collect();
                let mut ys: Vec<f64> = raw.iter().map(|r| r.1).collect();
                xs.sort_by(f64::total_cmp);
                ys.sort_by(|a, b| b.total_cmp(a));
                let mut pts = vec![(0.0, 1.0)];
                pts.extend(xs.into_iter().zip(ys));
                pts.push((1.0, 0.0));
                CostFunction::piecewise_linear(pts).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn accept_probability_non_increasing(c in cost_strategy(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let plo = icm_accept_probability(&c, lo).unwrap();
            let phi = icm_accept_probability(&c, hi).unwrap();
            prop_assert!(plo >= phi - 1e-12);
            prop_assert_eq!(icm_accept_probability(&c, 0.0).unwrap(), 1.0);
        }

        #[test]
        fn accept_probability_is_the_generalized_inverse(c in cost_strategy(), price in 0.001f64..=1.0) {
            let p = icm_accept_probability(&c, price).unwrap();
            // Every grid point strictly beyond p has cost below price.
            for x in c.grid() {
                if x > p + 1e-9 {
                    prop_assert!(c.cost(x) < price + 1e-9, "x={} cost={} price={} p={}", x, c.cost(x), price, p);
                }
            }
        }

        #[test]
        fn ltm_accept_monotone(price in 0.0f64..=1.0, alpha in 0.0f64..=1.0, theta in 0.001f64..=1.0,
                               d_alpha in 0.0f64..=1.0, d_price in 0.0f64..=1.0, d_theta in 0.0f64..=1.0) {
            let b = InfluenceFunction::linear();
            if ltm_accept(&b, price, alpha, theta) {
                prop_assert!(ltm_accept(&b, price, (alpha + d_alpha).min(1.0), theta));
                prop_assert!(ltm_accept(&b, price * d_price, alpha, theta));
                prop_assert!(ltm_accept(&b, price, alpha, theta * d_theta));
            }
        }

        #[test]
        fn line_revenue_monotone_and_bounded(c in cost_strategy(), n in 0usize..30) {
            let grid = c.grid();
            let a = line_revenue(&c, n, &grid).unwrap().value;
            let b = line_revenue(&c, n + 1, &grid).unwrap().value;
            prop_assert!(a <= b + 1e-12);
            let bound = grid.iter().filter(|&&x| x < 1.0)
                .map(|&x| x * c.cost(x) / (1.0 - x))
                .fold(0.0, f64::max);
            prop_assert!(b <= bound + 1e-9, "L_{} = {} > {}", n + 1, b, bound);
        }
    }
}
