//! Measurement harness: from-scratch vs. incremental cost and accuracy over
//! sweeps of update size, tolerance, and update location.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, NodeId, RowChangeSet, UpdateOp};
use crate::metrics::{exact_oracle_raw, l1_error, ORACLE_NODE_LIMIT};
use crate::propagation::{
    compute_offset_seed, cpi_raw, osp_merge, propagate_offset, theoretical_error_bound,
    theoretical_iteration_bound, Config, PropagationStats, ScoreVector,
};
use crate::stream::random_delete_batch;

/// Tolerance of the reference vector when the graph is too large to solve densely.
pub const REFERENCE_EPSILON: f64 = 1e-14;

pub const CSV_HEADER: &str =
    "sweep_value,method,iterations,visited_edges,wall_time,l1_error,q_offset_l1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "CPI")]
    Cpi,
    #[serde(rename = "OSP")]
    Osp,
    #[serde(rename = "OSP-T")]
    OspT,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Cpi => "CPI",
            Method::Osp => "OSP",
            Method::OspT => "OSP-T",
        }
    }
}

/// Cost and accuracy of one method on one update.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Measurement {
    pub stats: PropagationStats,
    /// Raw L1 distance to the reference on the updated graph.
    pub l1_error: f64,
}

/// All three methods measured on the same seed and update batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub cpi: Measurement,
    pub osp: Measurement,
    pub osp_t: Measurement,
    pub osp_t_config: Config,
}

/// Averaged row of the bench table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub sweep_value: f64,
    pub method: Method,
    pub iterations: f64,
    pub visited_edges: f64,
    pub wall_time: f64,
    pub l1_error: f64,
    pub q_offset_l1: f64,
}

/// Exact scores on `graph`: dense solve when small enough, else a very tight
/// cumulative power iteration.
pub fn reference_scores(
    graph: &DynamicGraph,
    seed: NodeId,
    config: &Config,
) -> Result<ScoreVector> {
    if graph.node_count() <= ORACLE_NODE_LIMIT {
        exact_oracle_raw(graph, seed, config.c)
    } else {
        let tight = config.with_epsilon(REFERENCE_EPSILON)?;
        Ok(cpi_raw(graph, seed, &tight)?.0)
    }
}

/// Random seeds drawn without replacement from nodes with out-edges.
pub fn pick_seeds(graph: &DynamicGraph, count: usize, rng_seed: u64) -> Result<Vec<NodeId>> {
    let candidates: Vec<NodeId> = graph
        .nodes()
        .filter(|&u| graph.is_alive(u) && graph.out_degree(u) > 0)
        .collect();
    if count > candidates.len() {
        return Err(Error::InvalidConfig(format!(
            "requested {count} seeds but only {} nodes have out-edges",
            candidates.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(index::sample(&mut rng, candidates.len(), count)
        .into_iter()
        .map(|i| candidates[i])
        .collect())
}

/// One batch applied to a copy of the graph, with the reference vector on
/// the updated graph, ready for any number of method runs.
pub struct PreparedUpdate {
    pub seed: NodeId,
    pub updated: DynamicGraph,
    pub changes: RowChangeSet,
    pub r_old: ScoreVector,
    pub reference: ScoreVector,
}

impl PreparedUpdate {
    /// `r_old` is the raw vector for `seed` on `graph`.
    pub fn new(
        graph: &DynamicGraph,
        seed: NodeId,
        r_old: &ScoreVector,
        ops: &[UpdateOp],
        config: &Config,
    ) -> Result<Self> {
        let mut updated = graph.clone();
        let changes = updated.apply_batch(ops, true)?;
        let mut r_old = r_old.clone();
        r_old.extend_to(updated.node_count());
        let reference = reference_scores(&updated, seed, config)?;
        Ok(PreparedUpdate {
            seed,
            updated,
            changes,
            r_old,
            reference,
        })
    }

    /// From-scratch computation on the updated graph.
    pub fn run_cpi(&self, config: &Config) -> Result<Measurement> {
        let (fresh, stats) = cpi_raw(&self.updated, self.seed, config)?;
        Ok(Measurement {
            l1_error: l1_error(fresh.values(), self.reference.values())?,
            stats,
        })
    }

    /// Offset seed, propagation and merge at `config.epsilon`.
    pub fn run_incremental(&self, config: &Config) -> Result<Measurement> {
        let timer = Instant::now();
        let q = compute_offset_seed(&self.changes, &self.r_old, config.c)?;
        let (offset, mut stats) = propagate_offset(&self.updated, &q, config)?;
        let merged = osp_merge(&self.r_old, &offset)?;
        stats.wall_time = timer.elapsed().as_secs_f64();
        Ok(Measurement {
            l1_error: l1_error(merged.values(), self.reference.values())?,
            stats,
        })
    }
}

/// Measures CPI, OSP and OSP-T for one batch applied to a copy of `graph`.
///
/// CPI and OSP run at `config.epsilon`, OSP-T at `osp_t_epsilon`.
pub fn measure_update(
    graph: &DynamicGraph,
    seed: NodeId,
    r_old: &ScoreVector,
    ops: &[UpdateOp],
    config: &Config,
    osp_t_epsilon: f64,
) -> Result<Trial> {
    let prepared = PreparedUpdate::new(graph, seed, r_old, ops, config)?;
    let osp_t_config = config.with_epsilon(osp_t_epsilon)?;
    Ok(Trial {
        cpi: prepared.run_cpi(config)?,
        osp: prepared.run_incremental(config)?,
        osp_t: prepared.run_incremental(&osp_t_config)?,
        osp_t_config,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSetup {
    pub config: Config,
    pub osp_t_epsilon: f64,
    pub trials: usize,
    pub rng_seed: u64,
}

/// Result of a sweep: table rows plus every individual trial for checks.
#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub rows: Vec<BenchRow>,
    pub trials: Vec<(f64, Trial)>,
}

impl SweepOutcome {
    /// Trials breaking the iteration ceiling or the `ε / c` error ceiling
    /// on the OSP-T run.
    ///
    /// `r_old` is itself truncated at the CPI tolerance, and the update can
    /// amplify that truncation by at most `2 / c`, so the error allowance is
    /// `ε_T / c + 2(1 − c)·ε / c²`.
    pub fn violations(&self, config: &Config) -> Vec<String> {
        let old_error = (1.0 - config.c) * config.epsilon / config.c;
        let mut out = Vec::new();
        for (value, trial) in &self.trials {
            let cfg = &trial.osp_t_config;
            let bound = theoretical_iteration_bound(cfg);
            if trial.osp_t.stats.iterations > bound {
                out.push(format!(
                    "sweep {value}: OSP-T took {} iterations, bound {bound}",
                    trial.osp_t.stats.iterations
                ));
            }
            let allowance = theoretical_error_bound(cfg) + 2.0 * old_error / cfg.c;
            if trial.osp_t.l1_error > allowance {
                out.push(format!(
                    "sweep {value}: OSP-T error {:e} exceeds {:e}",
                    trial.osp_t.l1_error, allowance
                ));
            }
        }
        out
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

type Pick = fn(&Trial) -> &Measurement;

fn rows_for(value: f64, trials: &[&Trial]) -> Vec<BenchRow> {
    let pick: [(Method, Pick); 3] = [
        (Method::Cpi, |t| &t.cpi),
        (Method::Osp, |t| &t.osp),
        (Method::OspT, |t| &t.osp_t),
    ];
    pick.iter()
        .map(|(method, get)| BenchRow {
            sweep_value: value,
            method: *method,
            iterations: mean(trials.iter().map(|t| get(t).stats.iterations as f64)),
            visited_edges: mean(trials.iter().map(|t| get(t).stats.visited_edges as f64)),
            wall_time: mean(trials.iter().map(|t| get(t).stats.wall_time)),
            l1_error: mean(trials.iter().map(|t| get(t).l1_error)),
            q_offset_l1: mean(trials.iter().map(|t| get(t).stats.q_offset_l1)),
        })
        .collect()
}

/// Old vectors for each seed on the unmodified graph.
fn old_vectors(
    graph: &DynamicGraph,
    seeds: &[NodeId],
    config: &Config,
) -> Result<Vec<ScoreVector>> {
    seeds
        .iter()
        .map(|&s| cpi_raw(graph, s, config).map(|(r, _)| r))
        .collect()
}

/// For each size, `trials` random deletion batches of that size, one per seed.
pub fn size_sweep(
    graph: &DynamicGraph,
    sizes: &[usize],
    setup: &SweepSetup,
) -> Result<SweepOutcome> {
    let seeds = pick_seeds(graph, setup.trials, setup.rng_seed)?;
    let olds = old_vectors(graph, &seeds, &setup.config)?;
    let mut outcome = SweepOutcome::default();
    for &size in sizes {
        let mut trials = Vec::with_capacity(seeds.len());
        for (i, (&seed, r_old)) in seeds.iter().zip(&olds).enumerate() {
            let ops = random_delete_batch(graph, size, trial_seed(setup.rng_seed, size, i))?;
            trials.push(measure_update(
                graph,
                seed,
                r_old,
                &ops,
                &setup.config,
                setup.osp_t_epsilon,
            )?);
        }
        outcome
            .rows
            .extend(rows_for(size as f64, &trials.iter().collect::<Vec<_>>()));
        outcome
            .trials
            .extend(trials.into_iter().map(|t| (size as f64, t)));
    }
    Ok(outcome)
}

/// OSP-T at each tolerance on the same `batch_size`-edge deletions.
pub fn epsilon_sweep(
    graph: &DynamicGraph,
    epsilons: &[f64],
    batch_size: usize,
    setup: &SweepSetup,
) -> Result<SweepOutcome> {
    let seeds = pick_seeds(graph, setup.trials, setup.rng_seed)?;
    let olds = old_vectors(graph, &seeds, &setup.config)?;
    let mut per_eps: Vec<Vec<Trial>> = vec![Vec::new(); epsilons.len()];
    for (i, (&seed, r_old)) in seeds.iter().zip(&olds).enumerate() {
        let ops =
            random_delete_batch(graph, batch_size, trial_seed(setup.rng_seed, batch_size, i))?;
        let prepared = PreparedUpdate::new(graph, seed, r_old, &ops, &setup.config)?;
        let cpi = prepared.run_cpi(&setup.config)?;
        let osp = prepared.run_incremental(&setup.config)?;
        for (&eps, trials) in epsilons.iter().zip(per_eps.iter_mut()) {
            let osp_t_config = setup.config.with_epsilon(eps)?;
            trials.push(Trial {
                cpi: cpi.clone(),
                osp: osp.clone(),
                osp_t: prepared.run_incremental(&osp_t_config)?,
                osp_t_config,
            });
        }
    }
    let mut outcome = SweepOutcome::default();
    for (&eps, trials) in epsilons.iter().zip(per_eps) {
        outcome
            .rows
            .extend(rows_for(eps, &trials.iter().collect::<Vec<_>>()));
        outcome.trials.extend(trials.into_iter().map(|t| (eps, t)));
    }
    Ok(outcome)
}

/// Splits nodes with out-edges into `groups` equal bands by their score
/// for each seed (band 0 lowest), samples `per_group` nodes per band and
/// deletes one out-edge from each, as one batch per band.
pub fn location_sweep(
    graph: &DynamicGraph,
    groups: usize,
    per_group: usize,
    setup: &SweepSetup,
) -> Result<SweepOutcome> {
    if groups == 0 {
        return Err(Error::InvalidConfig("group count must be positive".into()));
    }
    let seeds = pick_seeds(graph, setup.trials, setup.rng_seed)?;
    let olds = old_vectors(graph, &seeds, &setup.config)?;
    let mut per_band: Vec<Vec<Trial>> = vec![Vec::new(); groups];
    for (i, (&seed, r_old)) in seeds.iter().zip(&olds).enumerate() {
        let mut nodes: Vec<NodeId> = graph
            .nodes()
            .filter(|&u| graph.is_alive(u) && graph.out_degree(u) > 0)
            .collect();
        nodes.sort_by(|&a, &b| r_old.get(a).total_cmp(&r_old.get(b)).then(a.cmp(&b)));
        let band_len = nodes.len() / groups;
        if band_len == 0 {
            return Err(Error::InvalidConfig(format!(
                "{} nodes cannot fill {groups} groups",
                nodes.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(setup.rng_seed, groups, i));
        for (band, trials) in per_band.iter_mut().enumerate() {
            let members = &nodes[band * band_len..(band + 1) * band_len];
            let ops: Vec<UpdateOp> = members
                .choose_multiple(&mut rng, per_group.min(members.len()))
                .map(|&u| {
                    let outs = graph.out_neighbors(u);
                    let v = *outs.choose(&mut rng).expect("node has out-edges");
                    UpdateOp::DeleteEdge(u, v)
                })
                .collect();
            let ops = if graph.is_undirected() {
                dedup_undirected(ops)
            } else {
                ops
            };
            trials.push(measure_update(
                graph,
                seed,
                r_old,
                &ops,
                &setup.config,
                setup.osp_t_epsilon,
            )?);
        }
    }
    let mut outcome = SweepOutcome::default();
    for (band, trials) in per_band.into_iter().enumerate() {
        let rows = rows_for(band as f64, &trials.iter().collect::<Vec<_>>());
        outcome
            .rows
            .extend(rows.into_iter().filter(|r| r.method == Method::OspT));
        outcome
            .trials
            .extend(trials.into_iter().map(|t| (band as f64, t)));
    }
    Ok(outcome)
}

fn dedup_undirected(ops: Vec<UpdateOp>) -> Vec<UpdateOp> {
    let mut seen = std::collections::HashSet::new();
    ops.into_iter()
        .filter(|op| match *op {
            UpdateOp::DeleteEdge(u, v) => seen.insert((u.min(v), u.max(v))),
            _ => true,
        })
        .collect()
}

fn trial_seed(base: u64, value: usize, index: usize) -> u64 {
    base ^ (value as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (index as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
}

pub fn format_csv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:e},{:e}",
            r.sweep_value,
            r.method.label(),
            r.iterations,
            r.visited_edges,
            r.wall_time,
            r.l1_error,
            r.q_offset_l1
        );
    }
    out
}
