use super::{exact_max_leaf_tree, SpanningTree, EXACT_MAX_NODES};
use crate::graph::{good_vertex_count, Graph};

/// Leaf-count bounds for one graph and one candidate tree.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafBoundReport {
    pub node_count: usize,
    /// vertices of degree >= 3
    pub n3: usize,
    pub good: usize,
    pub min_degree: usize,
    /// unrooted leaf count of the candidate tree
    pub tree_leaves: usize,
    /// `None` when the graph exceeds the exact solver's budget
    pub exact_leaves: Option<usize>,
    /// exact optimum >= n3/8 + 1
    pub degree_three_bound: Option<bool>,
    /// exact optimum >= n/4 + 2; only meaningful when min degree >= 3
    pub cubic_bound: Option<bool>,
    /// candidate tree >= max(g/100, 1)
    pub tree_target: bool,
    /// candidate tree >= half the exact optimum
    pub half_of_exact: Option<bool>,
}

impl LeafBoundReport {
    /// True when every bound that applies to the exact optimum holds.
    pub fn exact_bounds_hold(&self) -> bool {
        self.degree_three_bound != Some(false) && self.cubic_bound != Some(false)
    }
}

pub fn check_leaf_bounds(g: &Graph, t: &SpanningTree) -> LeafBoundReport {
    let n = g.node_count();
    let n3 = (0..n).filter(|&v| g.degree(v) >= 3).count();
    let good = good_vertex_count(g);
    let min_degree = g.min_degree();
    let tree_leaves = t.unrooted_leaf_count();
    let exact_leaves = (n <= EXACT_MAX_NODES)
        .then(|| exact_max_leaf_tree(g).ok().map(|(_, count)| count))
        .flatten();

    let degree_three_bound = exact_leaves.map(|opt| opt as f64 >= n3 as f64 / 8.0 + 1.0);
    let cubic_bound = exact_leaves
        .filter(|_| min_degree >= 3)
        .map(|opt| opt as f64 >= n as f64 / 4.0 + 2.0);
    let tree_target = tree_leaves as f64 >= (good as f64 / 100.0).max(1.0);
    let half_of_exact = exact_leaves.map(|opt| 2 * tree_leaves >= opt);

    LeafBoundReport {
        node_count: n,
        n3,
        good,
        min_degree,
        tree_leaves,
        exact_leaves,
        degree_three_bound,
        cubic_bound,
        tree_target,
        half_of_exact,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::maxleaf::approx_max_leaf_tree;
    use crate::maxleaf::exact::tests::brute_force_max_leaves;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cube() -> Graph {
        let edges = (0..8usize)
            .flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b))))
            .filter(|&(u, v)| u < v);
        Graph::from_edges(8, edges).unwrap()
    }

    fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, edges).unwrap()
    }

    fn random_connected(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Graph {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        for _ in 0..extra {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                edges.push((a, b));
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn path_is_vacuous() {
        let g = path(6);
        let t = approx_max_leaf_tree(&g, 0).unwrap();
        let r = check_leaf_bounds(&g, &t);
        assert_eq!((r.n3, r.good), (0, 0));
        assert!(r.exact_bounds_hold() && r.tree_target);
        assert_eq!(r.cubic_bound, None);
    }

    #[test]
    fn k4_exact_meets_bounds() {
        let g = complete(4);
        let (t, _) = exact_max_leaf_tree(&g).unwrap();
        let r = check_leaf_bounds(&g, &t);
        assert_eq!(r.exact_leaves, Some(3));
        assert_eq!(r.degree_three_bound, Some(true));
        assert_eq!(r.cubic_bound, Some(true));
    }

    #[test]
    fn cube_optimum_is_at_least_four() {
        let g = cube();
        let (t, count) = exact_max_leaf_tree(&g).unwrap();
        assert!(count >= 4);
        assert_eq!(count, brute_force_max_leaves(&g));
        assert_eq!(check_leaf_bounds(&g, &t).cubic_bound, Some(true));
    }

    #[test]
    fn petersen_optimum_and_approximation() {
        let g = petersen();
        let (_, opt) = exact_max_leaf_tree(&g).unwrap();
        assert!(opt >= 5);
        let t = approx_max_leaf_tree(&g, 0).unwrap();
        t.validate(&g).unwrap();
        assert!(2 * t.unrooted_leaf_count() >= opt);
    }

    #[test]
    fn approximation_regression_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(2..=12);
            let extra = rng.gen_range(0..=2 * n);
            let g = random_connected(n, extra, &mut rng);
            let t = approx_max_leaf_tree(&g, 0).unwrap();
            t.validate(&g).unwrap();
            let r = check_leaf_bounds(&g, &t);
            assert!(r.exact_bounds_hold(), "{g:?} {r:?}");
            assert_eq!(r.half_of_exact, Some(true), "{g:?} {r:?}");
            assert!(r.tree_target);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn approx_is_a_spanning_tree(seed in any::<u64>(), n in 1usize..40, extra in 0usize..80) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_connected(n, extra, &mut rng);
            let root = rng.gen_range(0..n);
            let t = approx_max_leaf_tree(&g, root).unwrap();
            prop_assert!(t.validate(&g).is_ok());
            prop_assert_eq!(t.root(), root);
        }
    }
}
