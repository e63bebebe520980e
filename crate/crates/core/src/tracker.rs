//! Per-seed lifecycle: cold start, incremental updates, read-out, refresh.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, NodeId, RowChangeSet, UpdateOp};
use crate::propagation::{
    compute_offset_seed, cpi_raw, dead_end_rescale, osp_merge, propagate_offset, Config,
    DeadEndMode, PropagationStats, ScoreVector,
};
use crate::scores;

const CHECKPOINT_TAG: &str = "#rwr-checkpoint";

#[derive(Debug, Clone)]
pub struct RwrTracker {
    seed: NodeId,
    config: Config,
    r_raw: ScoreVector,
    batches_applied: usize,
    refresh_every: Option<usize>,
    init_stats: PropagationStats,
    cumulative_stats: Vec<PropagationStats>,
}

impl RwrTracker {
    /// Runs a from-scratch computation for `seed` on `graph`.
    pub fn init(graph: &DynamicGraph, seed: NodeId, config: Config) -> Result<Self> {
        let (r_raw, init_stats) = cpi_raw(graph, seed, &config)?;
        Ok(RwrTracker {
            seed,
            config,
            r_raw,
            batches_applied: 0,
            refresh_every: None,
            init_stats,
            cumulative_stats: Vec::new(),
        })
    }

    /// Recompute from scratch after every `n` batches.
    ///
    /// Each loose-tolerance update may add up to `ε / c` of L1 error, so
    /// without refreshes the worst case grows linearly with the batch count.
    pub fn with_refresh_every(mut self, n: Option<usize>) -> Self {
        self.refresh_every = n.filter(|&n| n > 0);
        self
    }

    /// Changes the tolerance used for subsequent updates.
    pub fn set_epsilon(&mut self, epsilon: f64) -> Result<()> {
        self.config = self.config.with_epsilon(epsilon)?;
        Ok(())
    }

    pub fn seed(&self) -> NodeId {
        self.seed
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn raw(&self) -> &ScoreVector {
        &self.r_raw
    }

    pub fn batches_applied(&self) -> usize {
        self.batches_applied
    }

    pub fn init_stats(&self) -> &PropagationStats {
        &self.init_stats
    }

    pub fn cumulative_stats(&self) -> &[PropagationStats] {
        &self.cumulative_stats
    }

    /// Mutates `graph` with `ops` and brings the scores up to date.
    pub fn update(
        &mut self,
        graph: &mut DynamicGraph,
        ops: &[UpdateOp],
    ) -> Result<PropagationStats> {
        self.update_with(graph, ops, true)
    }

    pub fn update_with(
        &mut self,
        graph: &mut DynamicGraph,
        ops: &[UpdateOp],
        strict: bool,
    ) -> Result<PropagationStats> {
        if ops.contains(&UpdateOp::DeleteNode(self.seed)) {
            return Err(Error::SeedDeleted(self.seed));
        }
        let changes = graph.apply_batch(ops, strict)?;
        self.apply_changes(graph, &changes)
    }

    /// Brings the scores up to date with a batch already applied to `graph`.
    ///
    /// Lets several trackers share one mutation: apply the batch once, then
    /// hand the resulting change set to each tracker.
    pub fn apply_changes(
        &mut self,
        graph: &DynamicGraph,
        changes: &RowChangeSet,
    ) -> Result<PropagationStats> {
        if changes.deleted_nodes().contains(&self.seed) || !graph.is_alive(self.seed) {
            return Err(Error::SeedDeleted(self.seed));
        }
        if changes.node_count_after() != graph.node_count() {
            return Err(Error::LengthMismatch {
                expected: graph.node_count(),
                actual: changes.node_count_after(),
            });
        }
        self.r_raw.extend_to(graph.node_count());
        let q = compute_offset_seed(changes, &self.r_raw, self.config.c)?;
        let mut stats = match propagate_offset(graph, &q, &self.config) {
            Ok((offset, stats)) => {
                self.r_raw = osp_merge(&self.r_raw, &offset)?;
                stats
            }
            Err(Error::NotConverged(partial)) => {
                let mut stats = self.rebuild(graph)?;
                stats.q_offset_l1 = partial.q_offset_l1;
                stats.visited_edges += partial.visited_edges;
                stats.wall_time += partial.wall_time;
                stats
            }
            Err(e) => return Err(e),
        };
        self.batches_applied += 1;
        if let Some(every) = self.refresh_every {
            if self.batches_applied.is_multiple_of(every) {
                let refresh = self.rebuild(graph)?;
                stats.visited_edges += refresh.visited_edges;
                stats.wall_time += refresh.wall_time;
                stats.rebuilt = true;
            }
        }
        self.cumulative_stats.push(stats.clone());
        Ok(stats)
    }

    /// Current scores; unit L1 mass under rescaling, raw otherwise.
    pub fn query(&self) -> Result<ScoreVector> {
        match self.config.dead_end_mode {
            DeadEndMode::Rescale => dead_end_rescale(&self.r_raw),
            DeadEndMode::None => {
                if self.r_raw.l1() > 0.0 {
                    Ok(self.r_raw.clone())
                } else {
                    Err(Error::ZeroMass)
                }
            }
        }
    }

    /// Replaces the scores with a from-scratch computation on `graph`.
    pub fn refresh(&mut self, graph: &DynamicGraph) -> Result<PropagationStats> {
        self.rebuild(graph)
    }

    fn rebuild(&mut self, graph: &DynamicGraph) -> Result<PropagationStats> {
        let (r_raw, mut stats) = cpi_raw(graph, self.seed, &self.config)?;
        self.r_raw = r_raw;
        stats.rebuilt = true;
        Ok(stats)
    }

    /// Serializes the raw scores with a header identifying the tracker.
    pub fn checkpoint(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{CHECKPOINT_TAG} seed={} c={} epsilon={} batches={}",
            self.seed, self.config.c, self.config.epsilon, self.batches_applied
        );
        out.push_str(&scores::format_dump(self.r_raw.values(), &[]));
        out
    }

    /// Rebuilds a tracker from [`checkpoint`](Self::checkpoint) output
    /// without recomputing scores.
    ///
    /// The dead-end mode and execution mode come from `base`; restart
    /// probability and tolerance come from the checkpoint header.
    pub fn from_checkpoint(text: &str, graph: &DynamicGraph, base: Config) -> Result<Self> {
        let header = text
            .lines()
            .find(|l| l.starts_with(CHECKPOINT_TAG))
            .ok_or_else(|| Error::parse(1, "missing checkpoint header"))?;
        let mut seed = None;
        let mut c = None;
        let mut epsilon = None;
        let mut batches = None;
        for field in header[CHECKPOINT_TAG.len()..].split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::parse(1, format!("malformed header field `{field}`")))?;
            let bad = || Error::parse(1, format!("bad value for `{key}`"));
            match key {
                "seed" => seed = Some(value.parse::<usize>().map_err(|_| bad())?),
                "c" => c = Some(value.parse::<f64>().map_err(|_| bad())?),
                "epsilon" => epsilon = Some(value.parse::<f64>().map_err(|_| bad())?),
                "batches" => batches = Some(value.parse::<usize>().map_err(|_| bad())?),
                _ => {}
            }
        }
        let missing = |k: &str| Error::parse(1, format!("checkpoint header lacks `{k}`"));
        let seed = NodeId(seed.ok_or_else(|| missing("seed"))?);
        let mut config = base.with_epsilon(epsilon.ok_or_else(|| missing("epsilon"))?)?;
        config.c = c.ok_or_else(|| missing("c"))?;
        config.validate()?;

        let dump = scores::parse_dump(text)?;
        if dump.scores.len() != graph.node_count() {
            return Err(Error::LengthMismatch {
                expected: graph.node_count(),
                actual: dump.scores.len(),
            });
        }
        if !graph.is_alive(seed) {
            return Err(Error::InvalidNode(seed));
        }
        Ok(RwrTracker {
            seed,
            config,
            r_raw: ScoreVector::new(dump.scores)?,
            batches_applied: batches.ok_or_else(|| missing("batches"))?,
            refresh_every: None,
            init_stats: PropagationStats::default(),
            cumulative_stats: Vec::new(),
        })
    }
}
