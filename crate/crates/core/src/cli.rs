//! Command-line front end: `static`, `track`, `bench` and `metrics`.
//!
//! Exit codes: 0 on success, 1 when a verification run detects a bound or
//! validation violation, 2 on usage or I/O errors.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::bench::{self, SweepSetup};
use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, NodeId, UpdateOp};
use crate::metrics::{self, check_bounds, ComparisonReport};
use crate::propagation::{
    cpi_raw, dead_end_rescale, theoretical_error_bound, Config, DeadEndMode, Execution,
    PropagationStats,
};
use crate::scores::{self, format_dump};
use crate::stream::{
    make_snapshots, parse_edge_list, parse_update_stream, power_law_digraph, EdgeStream, IdMap,
    SnapshotPlan,
};
use crate::tracker::RwrTracker;

#[derive(Debug, Parser)]
#[command(
    name = "dynrwr",
    version,
    about = "Random walk with restart on dynamic graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute scores from scratch on one graph.
    Static(StaticArgs),
    /// Replay update batches and maintain scores incrementally.
    Track(TrackArgs),
    /// Compare from-scratch and incremental cost over a sweep; CSV output.
    Bench(BenchArgs),
    /// Compare two score dumps.
    Metrics(MetricsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeadEndArg {
    Rescale,
    None,
}

impl From<DeadEndArg> for DeadEndMode {
    fn from(v: DeadEndArg) -> Self {
        match v {
            DeadEndArg::Rescale => DeadEndMode::Rescale,
            DeadEndArg::None => DeadEndMode::None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Restart probability.
    #[arg(long, default_value_t = 0.15)]
    pub c: f64,
    /// Propagation tolerance on the L1 mass of the latest interim vector.
    #[arg(long, default_value_t = 1e-9)]
    pub epsilon: f64,
    #[arg(long = "dead-end", value_enum, default_value_t = DeadEndArg::Rescale)]
    pub dead_end: DeadEndArg,
    /// Evaluate the sparse multiply with a thread pool.
    #[arg(long)]
    pub parallel: bool,
}

impl CommonArgs {
    fn config(&self) -> Result<Config> {
        let config = Config::new(self.c, self.epsilon)?.with_dead_end_mode(self.dead_end.into());
        Ok(if self.parallel {
            config.with_execution(Execution::Parallel)
        } else {
            config
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Edge list (`src dst` per line, `#` comments).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Treat every edge as undirected.
    #[arg(long)]
    pub undirected: bool,
    /// Skip inapplicable updates instead of failing.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    /// Seed node, as an id of the input file.
    #[arg(long, conflicts_with = "random_seeds")]
    pub seed: Option<usize>,
    /// Number of seeds drawn from nodes with out-edges.
    #[arg(long)]
    pub random_seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct StaticArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Use the dense direct solver instead of iteration.
    #[arg(long)]
    pub exact: bool,
    /// Score dump path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrackArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Update stream; without it the edge list is split into an initial
    /// graph and insert snapshots.
    #[arg(long)]
    pub updates: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub snapshots: usize,
    #[arg(long, default_value_t = 0.5)]
    pub initial_fraction: f64,
    /// Recompute from scratch after every N batches.
    #[arg(long)]
    pub refresh_every: Option<usize>,
    /// Check the iteration bound on every batch; exit 1 on violation.
    #[arg(long)]
    pub verify: bool,
    /// Write a checkpoint per seed to this path.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Final score dump path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Size,
    Epsilon,
    Location,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = SweepKind::Size)]
    pub sweep: SweepKind,
    /// Comma-separated sweep values (batch sizes or tolerances).
    #[arg(long, value_delimiter = ',')]
    pub sweep_values: Vec<f64>,
    /// Seeds (one trial each) per sweep value.
    #[arg(long, default_value_t = 30)]
    pub random_seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Loose tolerance for the OSP-T rows.
    #[arg(long, default_value_t = 5e-3)]
    pub epsilon_t: f64,
    /// Deleted edges per trial in the epsilon sweep.
    #[arg(long, default_value_t = 100)]
    pub batch_size: usize,
    /// Score bands in the location sweep.
    #[arg(long, default_value_t = 10)]
    pub groups: usize,
    /// Nodes modified per band in the location sweep.
    #[arg(long, default_value_t = 10)]
    pub per_group: usize,
    /// Generate a power-law graph with this many nodes instead of reading one.
    #[arg(long)]
    pub synthetic_nodes: Option<usize>,
    /// Out-links per generated node.
    #[arg(long, default_value_t = 7)]
    pub synthetic_degree: usize,
    /// CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    /// Approximate scores.
    pub file_a: PathBuf,
    /// Reference scores.
    pub file_b: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug)]
pub enum CliError {
    Failed(Error),
    Violation(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failed(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 2,
            CliError::Violation(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Failed(e) => write!(f, "{e}"),
            CliError::Violation(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

/// Text sinks for one command: primary output and JSON stats lines.
pub struct Output<'a> {
    pub stdout: &'a mut dyn std::io::Write,
    pub stderr: &'a mut dyn std::io::Write,
}

pub fn run(cli: Cli, out: &mut Output<'_>) -> std::result::Result<(), CliError> {
    match cli.command {
        Command::Static(args) => cmd_static(&args, out),
        Command::Track(args) => cmd_track(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
        Command::Metrics(args) => cmd_metrics(&args, out),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(sink: &mut dyn std::io::Write, text: &str) -> Result<()> {
    sink.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Failed(Error::InvalidConfig(msg.into()))
}

/// Loaded input graph with dense ids.
struct Loaded {
    stream: EdgeStream,
    ids: IdMap,
    duplicates: usize,
}

fn load_stream(args: &GraphArgs) -> std::result::Result<Loaded, CliError> {
    let path = args
        .graph
        .as_ref()
        .ok_or_else(|| usage("--graph is required"))?;
    let raw = parse_edge_list(&read(path)?, args.undirected)?;
    let ids = IdMap::from_stream(&raw);
    let mut stream = ids.compact(&raw);
    let duplicates = stream.dedup();
    Ok(Loaded {
        stream,
        ids,
        duplicates,
    })
}

fn resolve_seeds(
    args: &SeedArgs,
    graph: &DynamicGraph,
    ids: &IdMap,
) -> std::result::Result<Vec<NodeId>, CliError> {
    match (args.seed, args.random_seeds) {
        (Some(original), _) => {
            let dense = ids
                .dense(original)
                .ok_or_else(|| usage(format!("seed {original} does not occur in the graph")))?;
            Ok(vec![NodeId(dense)])
        }
        (None, Some(k)) => Ok(bench::pick_seeds(graph, k, args.rng_seed)?),
        (None, None) => Err(usage("one of --seed or --random-seeds is required")),
    }
}

fn dump_path(out: &Path, original_seed: usize, multiple: bool) -> PathBuf {
    if multiple {
        let mut name = out.as_os_str().to_os_string();
        name.push(format!(".seed{original_seed}"));
        PathBuf::from(name)
    } else {
        out.to_path_buf()
    }
}

fn idmap_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".idmap");
    PathBuf::from(name)
}

fn dump_header(
    original_seed: usize,
    config: &Config,
    raw_mass: f64,
    stats: &PropagationStats,
) -> Vec<(&'static str, String)> {
    vec![
        ("seed", original_seed.to_string()),
        ("c", config.c.to_string()),
        ("epsilon", config.epsilon.to_string()),
        (
            "dead_end",
            match config.dead_end_mode {
                DeadEndMode::Rescale => "rescale".into(),
                DeadEndMode::None => "none".into(),
            },
        ),
        ("raw_mass", format!("{raw_mass:?}")),
        ("iterations", stats.iterations.to_string()),
        ("visited_edges", stats.visited_edges.to_string()),
    ]
}

/// Writes each dump to its file (plus the id map), or all to stdout.
fn write_dumps(
    target: Option<&Path>,
    dumps: &[(usize, String)],
    ids: &IdMap,
    out: &mut Output<'_>,
) -> Result<()> {
    match target {
        Some(path) => {
            let multiple = dumps.len() > 1;
            for (seed, text) in dumps {
                write(&dump_path(path, *seed, multiple), text)?;
            }
            write(&idmap_path(path), &ids.format())
        }
        None => {
            for (_, text) in dumps {
                emit(out.stdout, text)?;
            }
            Ok(())
        }
    }
}

pub fn cmd_static(args: &StaticArgs, out: &mut Output<'_>) -> std::result::Result<(), CliError> {
    let config = args.common.config()?;
    let loaded = load_stream(&args.graph)?;
    let (graph, _) = loaded.stream.to_graph(true)?;
    let seeds = resolve_seeds(&args.seeds, &graph, &loaded.ids)?;

    let results: Vec<_> = seeds
        .par_iter()
        .map(|&seed| -> Result<_> {
            if args.exact {
                let raw = metrics::exact_oracle_raw(&graph, seed, config.c)?;
                let scores = metrics::exact_oracle(&graph, seed, config.c, config.dead_end_mode)?;
                Ok((seed, scores, raw.l1(), PropagationStats::default()))
            } else {
                let (raw, stats) = cpi_raw(&graph, seed, &config)?;
                let scores = match config.dead_end_mode {
                    DeadEndMode::Rescale => dead_end_rescale(&raw)?,
                    DeadEndMode::None => raw.clone(),
                };
                Ok((seed, scores, raw.l1(), stats))
            }
        })
        .collect::<Result<_>>()?;

    let stats_sink: &mut dyn std::io::Write = if args.out.is_some() {
        &mut *out.stdout
    } else {
        &mut *out.stderr
    };
    let mut dumps = Vec::new();
    for (seed, scores, raw_mass, stats) in &results {
        let original = loaded.ids.original(seed.index()).unwrap_or(seed.index());
        let line = json!({
            "seed": original,
            "iterations": stats.iterations,
            "visited_edges": stats.visited_edges,
            "wall_time": stats.wall_time,
            "duplicates_skipped": loaded.duplicates,
        });
        emit(stats_sink, &format!("{line}\n"))?;
        let header = dump_header(original, &config, *raw_mass, stats);
        dumps.push((original, format_dump(scores.values(), &header)));
    }
    write_dumps(args.out.as_deref(), &dumps, &loaded.ids, out)?;
    Ok(())
}

/// Update batches with ids translated to dense ids; nodes first seen in an
/// insertion are created on the fly.
fn translate_updates(
    ops: &[UpdateOp],
    ids: &mut IdMap,
    lenient: bool,
) -> std::result::Result<Vec<UpdateOp>, CliError> {
    let mut translated = Vec::with_capacity(ops.len());
    let intern = |ids: &mut IdMap, original: usize, out: &mut Vec<UpdateOp>| {
        let before = ids.len();
        let dense = ids.intern(original);
        if ids.len() > before {
            out.push(UpdateOp::InsertNode);
        }
        NodeId(dense)
    };
    for op in ops {
        match *op {
            UpdateOp::InsertEdge(u, v) => {
                let u = intern(ids, u.index(), &mut translated);
                let v = intern(ids, v.index(), &mut translated);
                translated.push(UpdateOp::InsertEdge(u, v));
            }
            UpdateOp::InsertNode => {
                let fresh = ids.fresh_original();
                intern(ids, fresh, &mut translated);
            }
            UpdateOp::DeleteEdge(u, v) => match (ids.dense(u.index()), ids.dense(v.index())) {
                (Some(a), Some(b)) => translated.push(UpdateOp::DeleteEdge(NodeId(a), NodeId(b))),
                _ if lenient => {}
                _ => return Err(Error::EdgeMissing(u, v).into()),
            },
            UpdateOp::DeleteNode(u) => match ids.dense(u.index()) {
                Some(a) => translated.push(UpdateOp::DeleteNode(NodeId(a))),
                None if lenient => {}
                None => return Err(Error::InvalidNode(u).into()),
            },
        }
    }
    Ok(translated)
}

/// Splits `ops` into `k` contiguous non-empty batches; the last takes the remainder.
fn split_batches(
    ops: Vec<UpdateOp>,
    k: usize,
) -> std::result::Result<Vec<Vec<UpdateOp>>, CliError> {
    if k == 0 || ops.len() < k {
        return Err(Error::StreamTooShort(format!(
            "{} updates cannot fill {k} non-empty batches",
            ops.len()
        ))
        .into());
    }
    let per = ops.len() / k;
    let mut batches = Vec::with_capacity(k);
    let mut rest = ops;
    for i in 0..k {
        if i + 1 == k {
            batches.push(std::mem::take(&mut rest));
        } else {
            let tail = rest.split_off(per);
            batches.push(std::mem::replace(&mut rest, tail));
        }
    }
    Ok(batches)
}

pub fn cmd_track(args: &TrackArgs, out: &mut Output<'_>) -> std::result::Result<(), CliError> {
    let config = args.common.config()?;
    let mut loaded = load_stream(&args.graph)?;
    let strict = !args.graph.lenient;

    let (mut graph, batches) = match &args.updates {
        Some(path) => {
            let ops = parse_update_stream(&read(path)?)?;
            let ops = translate_updates(&ops, &mut loaded.ids, args.graph.lenient)?;
            let (graph, _) = loaded.stream.to_graph(true)?;
            (graph, split_batches(ops, args.snapshots)?)
        }
        None => {
            let plan = SnapshotPlan {
                initial_fraction: args.initial_fraction,
                snapshot_count: args.snapshots,
                rng_seed: args.seeds.rng_seed,
            };
            let snaps = make_snapshots(&loaded.stream, &plan)?;
            let initial = EdgeStream::new(snaps.initial, loaded.stream.undirected);
            let (graph, _) = DynamicGraph::from_edges(
                loaded.ids.len(),
                &initial.edges,
                initial.undirected,
                true,
            )?;
            (graph, snaps.batches)
        }
    };

    let seeds = resolve_seeds(&args.seeds, &graph, &loaded.ids)?;
    let mut trackers: Vec<RwrTracker> = seeds
        .par_iter()
        .map(|&s| {
            RwrTracker::init(&graph, s, config).map(|t| t.with_refresh_every(args.refresh_every))
        })
        .collect::<Result<_>>()?;

    let mut apply_times = Vec::with_capacity(batches.len());
    let mut per_seed: Vec<Vec<PropagationStats>> = vec![Vec::new(); seeds.len()];
    for batch in &batches {
        if let Some(&seed) = seeds
            .iter()
            .find(|s| batch.contains(&UpdateOp::DeleteNode(**s)))
        {
            return Err(Error::SeedDeleted(seed).into());
        }
        let timer = std::time::Instant::now();
        let changes = graph.apply_batch(batch, strict)?;
        apply_times.push(timer.elapsed().as_secs_f64());
        let stats: Vec<PropagationStats> = trackers
            .par_iter_mut()
            .map(|t| t.apply_changes(&graph, &changes))
            .collect::<Result<_>>()?;
        for (slot, s) in per_seed.iter_mut().zip(stats) {
            slot.push(s);
        }
    }

    let mut violations = Vec::new();
    let stats_sink: &mut dyn std::io::Write = if args.out.is_some() {
        &mut *out.stdout
    } else {
        &mut *out.stderr
    };
    let mut dumps = Vec::new();
    for (tracker, stats) in trackers.iter().zip(&per_seed) {
        let original = loaded
            .ids
            .original(tracker.seed().index())
            .unwrap_or(tracker.seed().index());
        for (batch, s) in stats.iter().enumerate() {
            let line = json!({
                "seed": original,
                "batch": batch,
                "q_offset_l1": s.q_offset_l1,
                "iterations": s.iterations,
                "visited_edges": s.visited_edges,
                "wall_time": s.wall_time,
                "apply_time": apply_times[batch],
                "rebuilt": s.rebuilt,
            });
            emit(stats_sink, &format!("{line}\n"))?;
            if args.verify && !s.rebuilt {
                let (ok, note) = check_bounds(s, &config);
                if !ok {
                    violations.push(format!("seed {original} batch {batch}: {note}"));
                }
            }
        }
        let scores = tracker.query()?;
        let total =
            tracker
                .cumulative_stats()
                .iter()
                .fold(tracker.init_stats().clone(), |mut acc, s| {
                    acc.iterations += s.iterations;
                    acc.visited_edges += s.visited_edges;
                    acc
                });
        let mut header = dump_header(original, &config, tracker.raw().l1(), &total);
        header.push(("batches", tracker.batches_applied().to_string()));
        dumps.push((original, format_dump(scores.values(), &header)));
        if let Some(path) = &args.checkpoint {
            write(
                &dump_path(path, original, trackers.len() > 1),
                &tracker.checkpoint(),
            )?;
        }
    }
    for batch in 0..batches.len() {
        let n = per_seed.len() as f64;
        let mean = |f: &dyn Fn(&PropagationStats) -> f64| {
            per_seed.iter().map(|s| f(&s[batch])).sum::<f64>() / n
        };
        let line = json!({
            "batch": batch,
            "seeds": per_seed.len(),
            "mean_q_offset_l1": mean(&|s| s.q_offset_l1),
            "mean_iterations": mean(&|s| s.iterations as f64),
            "mean_visited_edges": mean(&|s| s.visited_edges as f64),
            "mean_wall_time": mean(&|s| s.wall_time),
        });
        emit(stats_sink, &format!("{line}\n"))?;
    }
    write_dumps(args.out.as_deref(), &dumps, &loaded.ids, out)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(violations.join("; ")))
    }
}

pub fn cmd_bench(args: &BenchArgs, out: &mut Output<'_>) -> std::result::Result<(), CliError> {
    let config = args.common.config()?;
    let graph = match args.synthetic_nodes {
        Some(n) => {
            power_law_digraph(n, args.synthetic_degree, 0.5, args.rng_seed)
                .to_graph(true)?
                .0
        }
        None => load_stream(&args.graph)?.stream.to_graph(true)?.0,
    };
    let setup = SweepSetup {
        config,
        osp_t_epsilon: args.epsilon_t,
        trials: args.random_seeds,
        rng_seed: args.rng_seed,
    };
    let outcome = match args.sweep {
        SweepKind::Size => {
            let sizes: Vec<usize> = if args.sweep_values.is_empty() {
                vec![1, 10, 100, 1000]
            } else {
                args.sweep_values.iter().map(|&v| v as usize).collect()
            };
            bench::size_sweep(&graph, &sizes, &setup)?
        }
        SweepKind::Epsilon => {
            let eps = if args.sweep_values.is_empty() {
                vec![1e-2, 1e-3, 1e-4, 1e-5]
            } else {
                args.sweep_values.clone()
            };
            bench::epsilon_sweep(&graph, &eps, args.batch_size, &setup)?
        }
        SweepKind::Location => bench::location_sweep(&graph, args.groups, args.per_group, &setup)?,
    };
    let csv = bench::format_csv(&outcome.rows);
    match &args.out {
        Some(path) => write(path, &csv)?,
        None => emit(out.stdout, &csv)?,
    }
    let violations = outcome.violations(&config);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(violations.join("; ")))
    }
}

fn raw_of(dump: &scores::ScoreDump) -> Vec<f64> {
    match dump
        .header_value("raw_mass")
        .and_then(|v| v.parse::<f64>().ok())
    {
        Some(mass) if dump.header_value("dead_end") != Some("none") => {
            dump.scores.iter().map(|s| s * mass).collect()
        }
        _ => dump.scores.clone(),
    }
}

pub fn cmd_metrics(args: &MetricsArgs, out: &mut Output<'_>) -> std::result::Result<(), CliError> {
    let config = args.common.config()?;
    let a = scores::parse_dump(&read(&args.file_a)?)?;
    let b = scores::parse_dump(&read(&args.file_b)?)?;
    if a.scores.len() != b.scores.len() {
        return Err(Error::LengthMismatch {
            expected: b.scores.len(),
            actual: a.scores.len(),
        }
        .into());
    }
    let l1 = metrics::l1_error(&a.scores, &b.scores)?;
    let rho = metrics::spearman(&a.scores, &b.scores).ok();
    let raw_l1 = metrics::l1_error(&raw_of(&a), &raw_of(&b))?;
    let header_num = |key: &str| a.header_value(key).and_then(|v| v.parse::<f64>().ok());
    let stats = PropagationStats {
        iterations: header_num("iterations").unwrap_or(0.0) as usize,
        visited_edges: header_num("visited_edges").unwrap_or(0.0) as u64,
        wall_time: header_num("wall_time").unwrap_or(0.0),
        ..Default::default()
    };
    let report =
        ComparisonReport::from_parts(l1, rho, raw_l1, &stats, theoretical_error_bound(&config));
    emit(out.stdout, &format!("{}\n", report.to_json()))?;
    Ok(())
}

/// Convenience wrapper for the binary: parse `args`, run, and map to an exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut so = stdout.lock();
    let mut se = stderr.lock();
    let result = run(
        cli,
        &mut Output {
            stdout: &mut so,
            stderr: &mut se,
        },
    );
    let _ = so.flush();
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(se, "dynrwr: {e}");
            e.exit_code()
        }
    }
}
