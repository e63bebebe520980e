//! Accuracy metrics and an exact reference solver.
//!
//! The reference solver builds `I − (1 − c)·Ãᵀ` densely and solves it with an
//! LU factorization, so it shares no code with the iterative engine.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, NodeId};
use crate::propagation::{
    dead_end_rescale, theoretical_error_bound, theoretical_iteration_bound, Config, DeadEndMode,
    PropagationStats, ScoreVector,
};

/// Largest graph the dense solver accepts.
pub const ORACLE_NODE_LIMIT: usize = 5000;

/// Solver output below this magnitude is rounding noise around zero.
const SOLVE_NOISE: f64 = 1e-12;

pub fn l1_error(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two observations"));
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let mean = (a.len() as f64 + 1.0) / 2.0;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        let (dx, dy) = (x - mean, y - mean);
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "constant input has no rank variance",
        ));
    }
    Ok((cov / (va * vb).sqrt()).clamp(-1.0, 1.0))
}

/// Raw solution of `r = (1 − c)·Ãᵀ·r + c·e_seed` by dense LU.
pub fn exact_oracle_raw(graph: &DynamicGraph, seed: NodeId, c: f64) -> Result<ScoreVector> {
    let n = graph.node_count();
    if n > ORACLE_NODE_LIMIT {
        return Err(Error::OracleTooLarge {
            nodes: n,
            limit: ORACLE_NODE_LIMIT,
        });
    }
    if !graph.is_alive(seed) {
        return Err(Error::InvalidNode(seed));
    }
    let mut system = DMatrix::<f64>::identity(n, n);
    for (u, v) in graph.edges() {
        system[(v.index(), u.index())] -= (1.0 - c) / graph.out_degree(u) as f64;
    }
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[seed.index()] = c;
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidConfig("singular system".into()))?;
    let values = solution
        .iter()
        .map(|&v| if v < 0.0 && v > -SOLVE_NOISE { 0.0 } else { v })
        .collect();
    ScoreVector::new(values)
}

/// Exact scores finalized like the engine's read-out.
pub fn exact_oracle(
    graph: &DynamicGraph,
    seed: NodeId,
    c: f64,
    mode: DeadEndMode,
) -> Result<ScoreVector> {
    let raw = exact_oracle_raw(graph, seed, c)?;
    match mode {
        DeadEndMode::Rescale => dead_end_rescale(&raw),
        DeadEndMode::None => Ok(raw),
    }
}

/// Exact scores under the classical dead-end fix: every live dead-end gets
/// a single arc back to the seed.
pub fn augmented_oracle(graph: &DynamicGraph, seed: NodeId, c: f64) -> Result<ScoreVector> {
    let mut augmented = graph.clone();
    let patches: Vec<_> = graph
        .nodes()
        .filter(|&u| graph.is_alive(u) && graph.out_degree(u) == 0)
        .map(|u| crate::graph::UpdateOp::InsertEdge(u, seed))
        .collect();
    augmented.apply_batch(&patches, true)?;
    exact_oracle_raw(&augmented, seed, c)
}

/// `(iterations ≤ ceil(log_{1−c}(ε/2)), note)`.
pub fn check_bounds(stats: &PropagationStats, config: &Config) -> (bool, String) {
    let bound = theoretical_iteration_bound(config);
    let ok = stats.iterations <= bound;
    let note = if ok {
        format!("{} iterations within bound {bound}", stats.iterations)
    } else {
        format!("{} iterations exceed bound {bound}", stats.iterations)
    };
    (ok, note)
}

/// One approximate-vs-exact comparison. Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub l1_error: f64,
    /// `None` when rank correlation is undefined (constant vectors).
    pub spearman: Option<f64>,
    pub raw_l1_error: f64,
    pub iterations: usize,
    pub visited_edges: u64,
    pub wall_time: f64,
    pub bound_epsilon_over_c: f64,
    pub bound_satisfied: bool,
}

impl ComparisonReport {
    /// Compares raw vectors; `l1_error` and `spearman` use the rescaled forms.
    pub fn compare(
        approx_raw: &ScoreVector,
        exact_raw: &ScoreVector,
        stats: &PropagationStats,
        config: &Config,
    ) -> Result<Self> {
        let raw_l1_error = l1_error(approx_raw.values(), exact_raw.values())?;
        let approx = dead_end_rescale(approx_raw)?;
        let exact = dead_end_rescale(exact_raw)?;
        Ok(Self::from_parts(
            l1_error(approx.values(), exact.values())?,
            spearman(approx.values(), exact.values()).ok(),
            raw_l1_error,
            stats,
            theoretical_error_bound(config),
        ))
    }

    pub fn from_parts(
        l1_error: f64,
        spearman: Option<f64>,
        raw_l1_error: f64,
        stats: &PropagationStats,
        bound_epsilon_over_c: f64,
    ) -> Self {
        ComparisonReport {
            l1_error,
            spearman,
            raw_l1_error,
            iterations: stats.iterations,
            visited_edges: stats.visited_edges,
            wall_time: stats.wall_time,
            bound_epsilon_over_c,
            bound_satisfied: raw_l1_error <= bound_epsilon_over_c,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::cpi_raw;
    use crate::stream::random_digraph;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> DynamicGraph {
        DynamicGraph::from_edges(n, edges, false, false).unwrap().0
    }

    #[test]
    fn l1_examples() {
        assert_eq!(l1_error(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(l1_error(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2.0);
        assert!((l1_error(&[0.5, 0.5], &[0.4, 0.6]).unwrap() - 0.2).abs() < 1e-15);
        assert!(l1_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn spearman_examples() {
        let a = [0.1, 0.4, 0.2, 0.3];
        assert_eq!(spearman(&a, &a).unwrap(), 1.0);
        let rev = [4.0, 3.0, 2.0, 1.0];
        assert_eq!(spearman(&[1.0, 2.0, 3.0, 4.0], &rev).unwrap(), -1.0);
        assert_eq!(
            spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 4.0, 3.0]).unwrap(),
            0.8
        );
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(
            average_ranks(&[0.0, 5.0, 0.0, 2.0, 0.0]),
            vec![2.0, 5.0, 2.0, 4.0, 2.0]
        );
        // Brute force: rank correlation via the explicit average-rank definition.
        let a = [0.0, 0.0, 1.0, 2.0];
        let b = [0.0, 1.0, 1.0, 3.0];
        let (ra, rb) = ([1.5, 1.5, 3.0, 4.0], [1.0, 2.5, 2.5, 4.0]);
        let m = 2.5;
        let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - m) * (y - m)).sum();
        let va: f64 = ra.iter().map(|x| (x - m) * (x - m)).sum();
        let vb: f64 = rb.iter().map(|y| (y - m) * (y - m)).sum();
        assert!((spearman(&a, &b).unwrap() - cov / (va * vb).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn oracle_examples() {
        let cycle = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let r = exact_oracle(&cycle, NodeId(0), 0.15, DeadEndMode::Rescale).unwrap();
        for (x, y) in r.values().iter().zip([0.3887, 0.3304, 0.2809]) {
            assert!((x - y).abs() < 5e-5);
        }
        let single = graph(1, &[]);
        assert_eq!(
            exact_oracle(&single, NodeId(0), 0.15, DeadEndMode::Rescale)
                .unwrap()
                .values(),
            &[1.0]
        );
        let big = DynamicGraph::new(ORACLE_NODE_LIMIT + 1, false);
        assert!(matches!(
            exact_oracle_raw(&big, NodeId(0), 0.15),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn oracle_agrees_with_cpi() {
        let config = Config::new(0.15, 1e-12).unwrap();
        for seed in 0..100u64 {
            let n = 5 + (seed as usize * 37) % 96;
            let g = random_digraph(n, n * (1 + seed as usize % 5), seed)
                .to_graph(false)
                .unwrap()
                .0;
            let s = NodeId(seed as usize % n);
            let (engine, _) = cpi_raw(&g, s, &config).unwrap();
            let oracle = exact_oracle_raw(&g, s, 0.15).unwrap();
            assert!(l1_error(engine.values(), oracle.values()).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn check_bounds_examples() {
        let config = Config::new(0.15, 5e-3).unwrap();
        let stats = |iterations| PropagationStats {
            iterations,
            ..Default::default()
        };
        assert!(check_bounds(&stats(37), &config).0);
        assert!(check_bounds(&stats(2), &config).0);
        let (ok, note) = check_bounds(&stats(200), &config);
        assert!(!ok);
        assert!(note.contains("37"));
    }

    #[test]
    fn report_json_key_order() {
        let stats = PropagationStats {
            iterations: 3,
            visited_edges: 12,
            wall_time: 0.5,
            ..Default::default()
        };
        let report = ComparisonReport::from_parts(0.1, Some(0.9), 0.2, &stats, 0.25);
        assert!(report.bound_satisfied);
        assert_eq!(
            report.to_json(),
            r#"{"l1_error":0.1,"spearman":0.9,"raw_l1_error":0.2,"iterations":3,"visited_edges":12,"wall_time":0.5,"bound_epsilon_over_c":0.25,"bound_satisfied":true}"#
        );
        let strict = ComparisonReport::from_parts(0.1, None, 0.25, &stats, 0.25);
        assert!(strict.bound_satisfied);
        assert!(!ComparisonReport::from_parts(0.1, None, 0.2500001, &stats, 0.25).bound_satisfied);
    }

    proptest! {
        #[test]
        fn spearman_self_is_one(v in prop::collection::vec(0.0f64..1.0, 2..40)) {
            prop_assume!(v.iter().any(|x| *x != v[0]));
            prop_assert!((spearman(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn spearman_monotone_invariance(
            a in prop::collection::vec(0.01f64..1.0, 3..40),
            b in prop::collection::vec(0.01f64..1.0, 3..40),
        ) {
            let n = a.len().min(b.len());
            let (a, b) = (&a[..n], &b[..n]);
            prop_assume!(a.iter().any(|x| *x != a[0]) && b.iter().any(|x| *x != b[0]));
            let ta: Vec<f64> = a.iter().map(|x| x.ln() * 3.0 - 1.0).collect();
            let tb: Vec<f64> = b.iter().map(|x| x.powi(3)).collect();
            let base = spearman(a, b).unwrap();
            prop_assert!((spearman(&ta, &tb).unwrap() - base).abs() < 1e-12);
        }

        #[test]
        fn l1_triangle_inequality(
            v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 1..30)
        ) {
            let a: Vec<f64> = v.iter().map(|t| t.0).collect();
            let b: Vec<f64> = v.iter().map(|t| t.1).collect();
            let c: Vec<f64> = v.iter().map(|t| t.2).collect();
            let ab = l1_error(&a, &b).unwrap();
            let bc = l1_error(&b, &c).unwrap();
            let ac = l1_error(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}
