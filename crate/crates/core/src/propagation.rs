//! Numerical core: cumulative power iteration, offset seeds, offset
//! propagation, merge and dead-end rescaling.
//!
//! All propagation runs share one loop. Starting from an interim vector
//! `x⁽⁰⁾`, it repeatedly applies `(1 − c)·Bᵀ` (with `B` the row-normalized
//! adjacency of the current graph) and accumulates every interim vector,
//! stopping as soon as the most recent interim vector has L1 mass `≤ ε`.
//! For a cold start `x⁽⁰⁾ = c·e_seed`; for an incremental update `x⁽⁰⁾` is the
//! offset seed `(1 − c)·ΔAᵀ·r_old`.
//!
//! Vectors are kept raw (no dead-end correction) everywhere. Dead-end nodes
//! leak mass, and dividing the raw accumulation by its L1 mass yields the
//! dead-end-corrected vector, so rescaling is deferred to read-out.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, NodeId, RowChangeSet};

/// Merge results in `[-NEGATIVE_TOLERANCE, 0)` are rounding noise and clamp to zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_RESTART: f64 = 0.15;
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeadEndMode {
    /// Divide the raw accumulation by its L1 mass at read-out.
    Rescale,
    /// Return the raw accumulation.
    None,
}

/// How the sparse multiply is evaluated.
///
/// Both modes add contributions to each entry in ascending source order, so
/// they produce bit-identical vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub c: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub dead_end_mode: DeadEndMode,
    pub execution: Execution,
}

impl Config {
    /// Validated config with rescaling on and the default iteration cap.
    pub fn new(c: f64, epsilon: f64) -> Result<Self> {
        let mut config = Config {
            c,
            epsilon,
            max_iterations: 1,
            dead_end_mode: DeadEndMode::Rescale,
            execution: Execution::Sequential,
        };
        config.validate()?;
        config.max_iterations = default_max_iterations(&config);
        Ok(config)
    }

    pub fn with_dead_end_mode(mut self, mode: DeadEndMode) -> Self {
        self.dead_end_mode = mode;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    /// Same config at a different tolerance, with the iteration cap re-derived.
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        self.max_iterations = default_max_iterations(&self);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "restart probability must lie in (0, 1), got {}",
                self.c
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for Config {
    fn default() -> Self {
        Config::new(DEFAULT_RESTART, DEFAULT_EPSILON).expect("default config is valid")
    }
}

fn default_max_iterations(config: &Config) -> usize {
    (10 * theoretical_iteration_bound(config)).max(1000)
}

/// `ceil(log_{1−c}(ε / 2))`, the offset-propagation iteration ceiling.
pub fn theoretical_iteration_bound(config: &Config) -> usize {
    let ratio = config.epsilon / 2.0;
    if ratio >= 1.0 {
        return 0;
    }
    (ratio.ln() / (1.0 - config.c).ln()).ceil() as usize
}

/// `ε / c`, the L1 error ceiling for one update at tolerance `ε`.
pub fn theoretical_error_bound(config: &Config) -> f64 {
    config.epsilon / config.c
}

fn l1(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).sum()
}

/// Non-negative dense score vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    values: Vec<f64>,
    l1: f64,
}

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((node, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::NegativeScore { node, value });
        }
        let l1 = l1(&values);
        Ok(ScoreVector { values, l1 })
    }

    pub fn zeros(len: usize) -> Self {
        ScoreVector {
            values: vec![0.0; len],
            l1: 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn get(&self, node: NodeId) -> f64 {
        self.values[node.index()]
    }

    /// Pads with zeros up to `len`; newly inserted nodes hold no mass yet.
    pub fn extend_to(&mut self, len: usize) {
        if len > self.values.len() {
            self.values.resize(len, 0.0);
        }
    }
}

/// Dense vector whose entries may be negative (offset seeds and offsets).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedScoreVector {
    values: Vec<f64>,
    l1: f64,
}

impl SignedScoreVector {
    pub fn new(values: Vec<f64>) -> Self {
        let l1 = l1(&values);
        SignedScoreVector { values, l1 }
    }

    pub fn zeros(len: usize) -> Self {
        SignedScoreVector {
            values: vec![0.0; len],
            l1: 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    /// Entrywise sum of the values.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationStats {
    /// Sparse multiplies performed.
    pub iterations: usize,
    /// `Σ out_degree(u)` over nonzero source entries, summed over iterations.
    pub visited_edges: u64,
    /// L1 mass of the starting interim vector.
    pub q_offset_l1: f64,
    /// Seconds spent propagating, excluding graph mutation and I/O.
    pub wall_time: f64,
    /// Set when the tracker fell back to a from-scratch computation.
    #[serde(default)]
    pub rebuilt: bool,
    /// `‖x⁽ⁱ⁾‖₁` for every interim vector, starting with `x⁽⁰⁾`.
    #[serde(skip)]
    pub interim_l1: Vec<f64>,
}

/// One application of `(1 − c)·Bᵀ`. Returns the visited-edge count.
fn multiply_into(
    graph: &DynamicGraph,
    x: &[f64],
    damping: f64,
    execution: Execution,
    out: &mut [f64],
) -> u64 {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut visited = 0u64;
    for (u, &xu) in x.iter().enumerate() {
        if xu != 0.0 {
            visited += graph.out_degree(NodeId(u)) as u64;
        }
    }
    match execution {
        Execution::Sequential => {
            for (u, &xu) in x.iter().enumerate() {
                if xu == 0.0 {
                    continue;
                }
                let outs = graph.out_neighbors(NodeId(u));
                if outs.is_empty() {
                    continue;
                }
                let share = damping * xu / outs.len() as f64;
                for v in outs {
                    out[v.index()] += share;
                }
            }
        }
        Execution::Parallel => {
            out.par_iter_mut().enumerate().for_each(|(v, slot)| {
                let mut acc = 0.0;
                for &u in graph.in_neighbors(NodeId(v)) {
                    let xu = x[u.index()];
                    if xu != 0.0 {
                        acc += damping * xu / graph.out_degree(u) as f64;
                    }
                }
                *slot = acc;
            });
        }
    }
    visited
}

/// Computes `(1 − c)·Ãᵀ·x` and the number of edges traversed.
pub fn spmv_transpose_normalized(
    graph: &DynamicGraph,
    x: &SignedScoreVector,
    c: f64,
) -> Result<(SignedScoreVector, u64)> {
    check_len(graph.node_count(), x.len())?;
    let mut out = vec![0.0; x.len()];
    let visited = multiply_into(graph, x.values(), 1.0 - c, Execution::Sequential, &mut out);
    Ok((SignedScoreVector::new(out), visited))
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

/// Accumulates `Σ_i ((1 − c)Bᵀ)^i x⁽⁰⁾` until the latest term has mass `≤ ε`.
fn accumulate(
    graph: &DynamicGraph,
    start: Vec<f64>,
    config: &Config,
) -> Result<(Vec<f64>, PropagationStats)> {
    let timer = Instant::now();
    let damping = 1.0 - config.c;
    let mut stats = PropagationStats {
        q_offset_l1: l1(&start),
        ..Default::default()
    };
    let mut total = start.clone();
    let mut current = start;
    let mut next = vec![0.0; current.len()];
    let mut mass = stats.q_offset_l1;
    stats.interim_l1.push(mass);
    while mass > config.epsilon {
        if stats.iterations >= config.max_iterations {
            stats.wall_time = timer.elapsed().as_secs_f64();
            return Err(Error::NotConverged(stats));
        }
        stats.visited_edges += multiply_into(graph, &current, damping, config.execution, &mut next);
        std::mem::swap(&mut current, &mut next);
        for (t, x) in total.iter_mut().zip(&current) {
            *t += x;
        }
        mass = l1(&current);
        stats.interim_l1.push(mass);
        stats.iterations += 1;
    }
    stats.wall_time = timer.elapsed().as_secs_f64();
    Ok((total, stats))
}

/// Raw cumulative power iteration from `c·e_seed`; no dead-end correction.
pub fn cpi_raw(
    graph: &DynamicGraph,
    seed: NodeId,
    config: &Config,
) -> Result<(ScoreVector, PropagationStats)> {
    config.validate()?;
    if !graph.is_alive(seed) {
        return Err(Error::InvalidNode(seed));
    }
    let mut start = vec![0.0; graph.node_count()];
    start[seed.index()] = config.c;
    let (values, stats) = accumulate(graph, start, config)?;
    Ok((ScoreVector::new(values)?, stats))
}

/// Cumulative power iteration, finalized according to `config.dead_end_mode`.
pub fn cpi(
    graph: &DynamicGraph,
    seed: NodeId,
    config: &Config,
) -> Result<(ScoreVector, PropagationStats)> {
    let (raw, stats) = cpi_raw(graph, seed, config)?;
    let finalized = match config.dead_end_mode {
        DeadEndMode::Rescale => dead_end_rescale(&raw)?,
        DeadEndMode::None => raw,
    };
    Ok((finalized, stats))
}

/// `q_offset = (1 − c)·ΔÃᵀ·r_old`, touching only modified rows.
///
/// `r_old_raw` must already be padded to the post-update node count.
pub fn compute_offset_seed(
    changes: &RowChangeSet,
    r_old_raw: &ScoreVector,
    c: f64,
) -> Result<SignedScoreVector> {
    check_len(changes.node_count_after(), r_old_raw.len())?;
    let damping = 1.0 - c;
    let mut q = vec![0.0; r_old_raw.len()];
    for row in changes.rows() {
        let mass = r_old_raw.get(row.node);
        if mass == 0.0 || row.is_unchanged() {
            continue;
        }
        if row.old_degree() > 0 {
            let share = damping * mass / row.old_degree() as f64;
            for v in &row.old_neighbors {
                q[v.index()] -= share;
            }
        }
        if row.new_degree() > 0 {
            let share = damping * mass / row.new_degree() as f64;
            for v in &row.new_neighbors {
                q[v.index()] += share;
            }
        }
    }
    Ok(SignedScoreVector::new(q))
}

/// `r_offset = Σ_{i≥0} ((1 − c)B̃ᵀ)^i q_offset`, including the `i = 0` term.
pub fn propagate_offset(
    graph: &DynamicGraph,
    q_offset: &SignedScoreVector,
    config: &Config,
) -> Result<(SignedScoreVector, PropagationStats)> {
    config.validate()?;
    check_len(graph.node_count(), q_offset.len())?;
    let (values, stats) = accumulate(graph, q_offset.values().to_vec(), config)?;
    Ok((SignedScoreVector::new(values), stats))
}

/// `r_new = r_old + r_offset`, clamping rounding-level negatives to zero.
pub fn osp_merge(r_old_raw: &ScoreVector, r_offset: &SignedScoreVector) -> Result<ScoreVector> {
    check_len(r_old_raw.len(), r_offset.len())?;
    let mut merged = Vec::with_capacity(r_old_raw.len());
    for (node, (a, b)) in r_old_raw.values().iter().zip(r_offset.values()).enumerate() {
        let v = a + b;
        if v < -NEGATIVE_TOLERANCE {
            return Err(Error::NegativeScore { node, value: v });
        }
        merged.push(v.max(0.0));
    }
    ScoreVector::new(merged)
}

/// Divides by the L1 mass, turning a leaky raw accumulation into a
/// dead-end-corrected vector of unit mass.
pub fn dead_end_rescale(r_temp: &ScoreVector) -> Result<ScoreVector> {
    let mass = r_temp.l1();
    if mass.is_nan() || mass <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let values: Vec<f64> = r_temp.values().iter().map(|v| v / mass).collect();
    ScoreVector::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::UpdateOp;

    fn graph(n: usize, edges: &[(usize, usize)]) -> DynamicGraph {
        DynamicGraph::from_edges(n, edges, false, false).unwrap().0
    }

    fn cfg(eps: f64) -> Config {
        Config::new(0.15, eps).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn config_validation() {
        assert!(Config::new(0.0, 1e-9).is_err());
        assert!(Config::new(1.0, 1e-9).is_err());
        assert!(Config::new(0.15, 0.0).is_err());
        assert!(Config::new(0.15, 1e-9)
            .unwrap()
            .with_max_iterations(0)
            .validate()
            .is_err());
        assert_eq!(Config::default().c, 0.15);
        assert_eq!(Config::default().epsilon, 1e-9);
        assert_eq!(Config::default().max_iterations, 1320);
        assert_eq!(cfg(2.0).max_iterations, 1000);
    }

    #[test]
    fn spmv_examples() {
        let cycle = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let x = SignedScoreVector::new(vec![0.15, 0.0, 0.0]);
        let (y, visited) = spmv_transpose_normalized(&cycle, &x, 0.15).unwrap();
        assert_close(y.values(), &[0.0, 0.1275, 0.0], 1e-15);
        assert_eq!(visited, 1);

        let star = graph(3, &[(0, 1), (0, 2)]);
        let x = SignedScoreVector::new(vec![1.0, 0.0, 0.0]);
        let (y, visited) = spmv_transpose_normalized(&star, &x, 0.15).unwrap();
        assert_close(y.values(), &[0.0, 0.425, 0.425], 1e-15);
        assert_eq!(visited, 2);

        let (y, visited) =
            spmv_transpose_normalized(&star, &SignedScoreVector::zeros(3), 0.15).unwrap();
        assert_eq!(y.values(), &[0.0, 0.0, 0.0]);
        assert_eq!(visited, 0);

        assert!(spmv_transpose_normalized(&star, &SignedScoreVector::zeros(2), 0.15).is_err());
    }

    #[test]
    fn cpi_three_cycle() {
        let cycle = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let (r, _) = cpi(&cycle, NodeId(0), &cfg(1e-12)).unwrap();
        // Closed form: r0 = 0.15 / (1 - 0.85^3), r1 = 0.85 r0, r2 = 0.85 r1.
        let r0 = 0.15 / (1.0 - 0.85f64.powi(3));
        assert_close(r.values(), &[r0, 0.85 * r0, 0.85 * 0.85 * r0], 1e-10);
        assert_close(r.values(), &[0.3887, 0.3304, 0.2809], 5e-5);
    }

    #[test]
    fn cpi_isolated_and_star() {
        let single = graph(1, &[]);
        let (r, stats) = cpi(&single, NodeId(0), &cfg(1e-12)).unwrap();
        assert_eq!(r.values(), &[1.0]);
        assert_eq!(stats.iterations, 1);

        let star = graph(3, &[(0, 1), (0, 2)]);
        let (raw, _) = cpi_raw(&star, NodeId(0), &cfg(1e-12)).unwrap();
        assert_close(raw.values(), &[0.15, 0.06375, 0.06375], 1e-15);
        let (r, _) = cpi(&star, NodeId(0), &cfg(1e-12)).unwrap();
        assert_close(
            r.values(),
            &[0.15 / 0.2775, 0.06375 / 0.2775, 0.06375 / 0.2775],
            1e-15,
        );
        assert_close(r.values(), &[0.54054, 0.22973, 0.22973], 1e-5);
    }

    #[test]
    fn cpi_rejects_bad_seed_and_reports_cap() {
        let cycle = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(cpi(&cycle, NodeId(5), &cfg(1e-9)).is_err());
        let capped = cfg(1e-12).with_max_iterations(3);
        match cpi(&cycle, NodeId(0), &capped) {
            Err(Error::NotConverged(stats)) => assert_eq!(stats.iterations, 3),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn offset_seed_examples() {
        let r_old = ScoreVector::new(vec![0.15, 0.06375, 0.06375]).unwrap();

        let empty = graph(3, &[(0, 1), (0, 2)]).apply_batch(&[], true).unwrap();
        let q = compute_offset_seed(&empty, &r_old, 0.15).unwrap();
        assert_eq!(q.values(), &[0.0, 0.0, 0.0]);

        let mut g = graph(3, &[(0, 1), (0, 2)]);
        let cs = g.apply_batch(&[UpdateOp::insert(1, 0)], true).unwrap();
        let q = compute_offset_seed(&cs, &r_old, 0.15).unwrap();
        assert_close(q.values(), &[0.0541875, 0.0, 0.0], 1e-15);

        let mut g = graph(3, &[(0, 1), (0, 2)]);
        let cs = g.apply_batch(&[UpdateOp::delete(0, 2)], true).unwrap();
        let q = compute_offset_seed(&cs, &r_old, 0.15).unwrap();
        assert_close(q.values(), &[0.0, 0.06375, -0.06375], 1e-15);
        assert!(q.sum().abs() < 1e-15);

        assert!(compute_offset_seed(&cs, &ScoreVector::zeros(2), 0.15).is_err());
    }

    #[test]
    fn propagate_offset_examples() {
        let g = graph(3, &[(0, 1), (0, 2), (1, 0)]);
        let (r, stats) = propagate_offset(&g, &SignedScoreVector::zeros(3), &cfg(1e-12)).unwrap();
        assert_eq!(r.values(), &[0.0; 3]);
        assert_eq!(stats.iterations, 0);

        let tiny = SignedScoreVector::new(vec![1e-13, -1e-13, 0.0]);
        let (r, stats) = propagate_offset(&g, &tiny, &cfg(1e-12)).unwrap();
        assert_eq!(r, tiny);
        assert_eq!(stats.iterations, 0);
        assert_eq!(stats.visited_edges, 0);

        let q = SignedScoreVector::new(vec![0.0541875, 0.0, 0.0]);
        let (r, _) = propagate_offset(&g, &q, &cfg(1e-12)).unwrap();
        // Each round trip 0 -> 1 -> 0 returns 0.85 * 0.5 * 0.85 of node 0's mass.
        let r0 = 0.0541875 / (1.0 - 0.85 * 0.85 / 2.0);
        assert_close(r.values(), &[r0, 0.425 * r0, 0.425 * r0], 1e-12);
        assert_close(r.values(), &[0.08483, 0.03605, 0.03605], 1e-5);
    }

    #[test]
    fn merge_examples() {
        let r_old = ScoreVector::new(vec![0.15, 0.06375, 0.06375]).unwrap();
        let same = osp_merge(&r_old, &SignedScoreVector::zeros(3)).unwrap();
        assert_eq!(same, r_old);

        // Star {0->1, 0->2} plus back edge 1->0, checked against fresh CPI.
        let mut g = graph(3, &[(0, 1), (0, 2)]);
        let cs = g.apply_batch(&[UpdateOp::insert(1, 0)], true).unwrap();
        let q = compute_offset_seed(&cs, &r_old, 0.15).unwrap();
        let (offset, _) = propagate_offset(&g, &q, &cfg(1e-12)).unwrap();
        let merged = osp_merge(&r_old, &offset).unwrap();
        let (fresh, _) = cpi_raw(&g, NodeId(0), &cfg(1e-12)).unwrap();
        let diff: f64 = merged
            .values()
            .iter()
            .zip(fresh.values())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(diff <= 1e-9);
        assert_close(merged.values(), &[0.23483, 0.09980, 0.09980], 1e-5);
    }

    #[test]
    fn merge_negative_handling() {
        let r_old = ScoreVector::new(vec![0.5, 0.0]).unwrap();
        let tiny = SignedScoreVector::new(vec![0.0, -5e-10]);
        assert_eq!(osp_merge(&r_old, &tiny).unwrap().values(), &[0.5, 0.0]);
        let bad = SignedScoreVector::new(vec![0.0, -1e-6]);
        assert!(matches!(
            osp_merge(&r_old, &bad),
            Err(Error::NegativeScore { node: 1, .. })
        ));
        assert!(osp_merge(&r_old, &SignedScoreVector::zeros(3)).is_err());
    }

    #[test]
    fn rescale_examples() {
        let raw = ScoreVector::new(vec![0.15, 0.06375, 0.06375]).unwrap();
        let r = dead_end_rescale(&raw).unwrap();
        assert!((r.l1() - 1.0).abs() < 1e-12);
        assert_close(r.values(), &[0.540540540, 0.229729729, 0.229729729], 1e-8);

        let unit = ScoreVector::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(dead_end_rescale(&unit).unwrap(), unit);

        assert!(matches!(
            dead_end_rescale(&ScoreVector::zeros(2)),
            Err(Error::ZeroMass)
        ));

        let cycle = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let config = cfg(1e-6);
        let (raw, _) = cpi_raw(&cycle, NodeId(0), &config).unwrap();
        let r = dead_end_rescale(&raw).unwrap();
        let diff: f64 = raw
            .values()
            .iter()
            .zip(r.values())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(diff <= theoretical_error_bound(&config));
    }

    #[test]
    fn iteration_bound_examples() {
        assert_eq!(theoretical_iteration_bound(&cfg(2.0)), 0);
        assert_eq!(theoretical_iteration_bound(&cfg(1e-9)), 132);
        assert_eq!(theoretical_iteration_bound(&cfg(5e-3)), 37);
    }

    #[test]
    fn error_bound_examples() {
        assert!((theoretical_error_bound(&cfg(5e-3)) - 0.033333333333333).abs() < 1e-12);
        assert!((theoretical_error_bound(&cfg(1e-4)) - 6.666666666666667e-4).abs() < 1e-15);
        assert!((theoretical_error_bound(&cfg(0.15)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let edges: Vec<(usize, usize)> = (0..40)
            .flat_map(|u| {
                [
                    (u, (u * 7 + 3) % 40),
                    (u, (u * 13 + 5) % 40),
                    (u, (u + 1) % 40),
                ]
            })
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let g = graph(40, &edges);
        let seq = cfg(1e-12);
        let par = seq.with_execution(Execution::Parallel);
        let (a, sa) = cpi_raw(&g, NodeId(3), &seq).unwrap();
        let (b, sb) = cpi_raw(&g, NodeId(3), &par).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa.iterations, sb.iterations);
        assert_eq!(sa.visited_edges, sb.visited_edges);
    }
}
