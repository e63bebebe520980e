//! Edge-list and update-stream parsing, id compaction, snapshot slicing and
//! random update generation.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, NodeId, UpdateOp};

/// Ordered `(src, dst)` pairs as read from a file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeStream {
    pub edges: Vec<(usize, usize)>,
    pub undirected: bool,
}

impl EdgeStream {
    pub fn new(edges: Vec<(usize, usize)>, undirected: bool) -> Self {
        EdgeStream { edges, undirected }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `max_id + 1`, or 0 for an empty stream.
    pub fn node_count(&self) -> usize {
        self.edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
    }

    /// Drops repeated edges, keeping first occurrences. For undirected
    /// streams `(u, v)` and `(v, u)` are the same edge. Returns the number
    /// dropped.
    pub fn dedup(&mut self) -> usize {
        let undirected = self.undirected;
        let mut seen = HashSet::with_capacity(self.edges.len());
        let before = self.edges.len();
        self.edges.retain(|&(u, v)| {
            let key = if undirected {
                (u.min(v), u.max(v))
            } else {
                (u, v)
            };
            seen.insert(key)
        });
        before - self.edges.len()
    }

    /// Builds a graph over `node_count()` nodes, skipping duplicate edges.
    pub fn to_graph(&self, lenient: bool) -> Result<(DynamicGraph, usize)> {
        DynamicGraph::from_edges(self.node_count(), &self.edges, self.undirected, lenient)
    }
}

pub fn parse_edge_list(text: &str, undirected: bool) -> Result<EdgeStream> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::parse(i + 1, "expected `src dst`"));
        };
        edges.push((parse_id(a, i + 1)?, parse_id(b, i + 1)?));
    }
    Ok(EdgeStream { edges, undirected })
}

pub fn format_edge_list(stream: &EdgeStream) -> String {
    let mut out = String::with_capacity(stream.len() * 12);
    for (u, v) in &stream.edges {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

fn parse_id(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid node id `{token}`")))
}

/// Parses `+ u v`, `- u v`, `+n` and `-n u` lines.
pub fn parse_update_stream(text: &str) -> Result<Vec<UpdateOp>> {
    let mut ops = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let op = match tokens.as_slice() {
            ["+", u, v] => UpdateOp::insert(parse_id(u, lineno)?, parse_id(v, lineno)?),
            ["-", u, v] => UpdateOp::delete(parse_id(u, lineno)?, parse_id(v, lineno)?),
            ["+n"] => UpdateOp::InsertNode,
            ["-n", u] => UpdateOp::DeleteNode(NodeId(parse_id(u, lineno)?)),
            ["+" | "-", ..] | ["+n", ..] | ["-n", ..] => {
                return Err(Error::parse(
                    lineno,
                    format!("wrong arity for `{}`", tokens[0]),
                ))
            }
            [other, ..] => return Err(Error::parse(lineno, format!("unknown op `{other}`"))),
            [] => unreachable!(),
        };
        ops.push(op);
    }
    Ok(ops)
}

pub fn format_update_stream(ops: &[UpdateOp]) -> String {
    let mut out = String::new();
    for op in ops {
        let _ = match op {
            UpdateOp::InsertEdge(u, v) => writeln!(out, "+ {u} {v}"),
            UpdateOp::DeleteEdge(u, v) => writeln!(out, "- {u} {v}"),
            UpdateOp::InsertNode => writeln!(out, "+n"),
            UpdateOp::DeleteNode(u) => writeln!(out, "-n {u}"),
        };
    }
    out
}

/// Bijection between original node ids and dense ids `0..n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    to_dense: HashMap<usize, usize>,
    to_original: Vec<usize>,
}

impl IdMap {
    /// Assigns dense ids in ascending original-id order.
    pub fn from_stream(stream: &EdgeStream) -> Self {
        let ids: BTreeSet<usize> = stream.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        let mut map = IdMap::default();
        for id in ids {
            map.intern(id);
        }
        map
    }

    pub fn len(&self) -> usize {
        self.to_original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_original.is_empty()
    }

    pub fn dense(&self, original: usize) -> Option<usize> {
        self.to_dense.get(&original).copied()
    }

    pub fn original(&self, dense: usize) -> Option<usize> {
        self.to_original.get(dense).copied()
    }

    /// Dense id for `original`, allocating the next one if unseen.
    pub fn intern(&mut self, original: usize) -> usize {
        if let Some(&d) = self.to_dense.get(&original) {
            return d;
        }
        let d = self.to_original.len();
        self.to_original.push(original);
        self.to_dense.insert(original, d);
        d
    }

    /// An original id not yet in use, for nodes created without one.
    pub fn fresh_original(&self) -> usize {
        self.to_original.iter().max().map_or(0, |m| m + 1)
    }

    pub fn compact(&self, stream: &EdgeStream) -> EdgeStream {
        EdgeStream {
            edges: stream
                .edges
                .iter()
                .map(|&(u, v)| (self.to_dense[&u], self.to_dense[&v]))
                .collect(),
            undirected: stream.undirected,
        }
    }

    /// Sidecar lines `original_id dense_id`.
    pub fn format(&self) -> String {
        let mut out = String::new();
        for (dense, original) in self.to_original.iter().enumerate() {
            let _ = writeln!(out, "{original} {dense}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = IdMap::default();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
                return Err(Error::parse(i + 1, "expected `original_id dense_id`"));
            };
            let (original, dense) = (parse_id(a, i + 1)?, parse_id(b, i + 1)?);
            if dense != map.len() || map.to_dense.contains_key(&original) {
                return Err(Error::parse(
                    i + 1,
                    "id map must list dense ids 0..n in order",
                ));
            }
            map.intern(original);
        }
        Ok(map)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotPlan {
    pub initial_fraction: f64,
    pub snapshot_count: usize,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshots {
    pub initial: Vec<(usize, usize)>,
    pub batches: Vec<Vec<UpdateOp>>,
}

/// Shuffles the stream and splits it into an initial part and
/// `snapshot_count` insert batches; the last batch takes the remainder.
///
/// Edges of undirected streams are shuffled as logical edges; the graph
/// inserts both arcs of each.
pub fn make_snapshots(stream: &EdgeStream, plan: &SnapshotPlan) -> Result<Snapshots> {
    if !(plan.initial_fraction > 0.0 && plan.initial_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "initial fraction must lie in (0, 1), got {}",
            plan.initial_fraction
        )));
    }
    if plan.snapshot_count == 0 {
        return Err(Error::InvalidConfig(
            "snapshot count must be at least 1".into(),
        ));
    }
    let len = stream.len();
    let initial_len = (plan.initial_fraction * len as f64).floor() as usize;
    let rest = len - initial_len;
    if initial_len == 0 || rest < plan.snapshot_count {
        return Err(Error::StreamTooShort(format!(
            "{len} edges cannot hold an initial part and {} non-empty batches",
            plan.snapshot_count
        )));
    }
    let mut edges = stream.edges.clone();
    edges.shuffle(&mut ChaCha8Rng::seed_from_u64(plan.rng_seed));
    let per_batch = rest / plan.snapshot_count;
    let remainder = edges.split_off(initial_len);
    let mut batches = Vec::with_capacity(plan.snapshot_count);
    let mut start = 0;
    for k in 0..plan.snapshot_count {
        let end = if k + 1 == plan.snapshot_count {
            rest
        } else {
            start + per_batch
        };
        batches.push(
            remainder[start..end]
                .iter()
                .map(|&(u, v)| UpdateOp::insert(u, v))
                .collect(),
        );
        start = end;
    }
    Ok(Snapshots {
        initial: edges,
        batches,
    })
}

/// `count` distinct existing edges sampled uniformly, as deletions.
///
/// Undirected graphs are sampled by logical edge.
pub fn random_delete_batch(
    graph: &DynamicGraph,
    count: usize,
    rng_seed: u64,
) -> Result<Vec<UpdateOp>> {
    let candidates: Vec<(NodeId, NodeId)> = graph
        .edges()
        .filter(|(u, v)| !graph.is_undirected() || u <= v)
        .collect();
    if count > candidates.len() {
        return Err(Error::InvalidConfig(format!(
            "cannot delete {count} edges from a graph with {}",
            candidates.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(index::sample(&mut rng, candidates.len(), count)
        .into_iter()
        .map(|i| {
            let (u, v) = candidates[i];
            UpdateOp::DeleteEdge(u, v)
        })
        .collect())
}

/// Directed preferential-attachment graph with a power-law in-degree tail.
///
/// Node `t` links to `out_per_node` earlier nodes chosen with probability
/// proportional to `in_degree + 1`; each such arc is reciprocated with
/// probability `reciprocity`, which keeps most nodes mutually reachable.
pub fn power_law_digraph(
    node_count: usize,
    out_per_node: usize,
    reciprocity: f64,
    rng_seed: u64,
) -> EdgeStream {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    // Each node appears once, plus once per in-edge received.
    let mut urn: Vec<usize> = Vec::with_capacity(node_count * (out_per_node + 1));
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    for t in 0..node_count {
        if t > 0 {
            let picks = out_per_node.min(t);
            let mut chosen = BTreeSet::new();
            let mut attempts = 0;
            while chosen.len() < picks && attempts < 50 * picks {
                chosen.insert(urn[rng.gen_range(0..urn.len())]);
                attempts += 1;
            }
            for v in chosen {
                if seen.insert((t, v)) {
                    edges.push((t, v));
                    urn.push(v);
                }
                if rng.gen_bool(reciprocity) && seen.insert((v, t)) {
                    edges.push((v, t));
                    urn.push(t);
                }
            }
        }
        urn.push(t);
    }
    EdgeStream::new(edges, false)
}

/// Uniform random digraph without duplicate arcs; self-loops allowed.
pub fn random_digraph(node_count: usize, edge_count: usize, rng_seed: u64) -> EdgeStream {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let capacity = node_count * node_count;
    let target = edge_count.min(capacity);
    let mut seen = HashSet::with_capacity(target);
    let mut edges = Vec::with_capacity(target);
    while edges.len() < target {
        let e = (rng.gen_range(0..node_count), rng.gen_range(0..node_count));
        if seen.insert(e) {
            edges.push(e);
        }
    }
    EdgeStream::new(edges, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_list_examples() {
        let s = parse_edge_list("# comment\n0 1\n1 2\n", false).unwrap();
        assert_eq!(s.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(s.node_count(), 3);
        assert_eq!(
            parse_edge_list("0\t1\n", false).unwrap().edges,
            vec![(0, 1)]
        );
        assert!(matches!(
            parse_edge_list("0 1 2\n", false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1\n\n0 x\n", false),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_edge_list("-1 2\n", false).is_err());
    }

    #[test]
    fn update_stream_examples() {
        assert_eq!(
            parse_update_stream("+ 0 1\n- 0 1\n").unwrap(),
            vec![UpdateOp::insert(0, 1), UpdateOp::delete(0, 1)]
        );
        assert_eq!(
            parse_update_stream("-n 5\n").unwrap(),
            vec![UpdateOp::DeleteNode(NodeId(5))]
        );
        assert_eq!(
            parse_update_stream("# c\n+n\n").unwrap(),
            vec![UpdateOp::InsertNode]
        );
        assert!(parse_update_stream("* 0 1\n").is_err());
        assert!(matches!(
            parse_update_stream("+ 0 1\n+ 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_update_stream("+n 3\n").is_err());
        let ops = vec![
            UpdateOp::insert(3, 4),
            UpdateOp::InsertNode,
            UpdateOp::DeleteNode(NodeId(2)),
            UpdateOp::delete(1, 0),
        ];
        assert_eq!(
            parse_update_stream(&format_update_stream(&ops)).unwrap(),
            ops
        );
    }

    #[test]
    fn dedup_respects_direction() {
        let mut s = EdgeStream::new(vec![(0, 1), (1, 0), (0, 1), (2, 2)], false);
        assert_eq!(s.dedup(), 1);
        assert_eq!(s.edges, vec![(0, 1), (1, 0), (2, 2)]);
        let mut u = EdgeStream::new(vec![(0, 1), (1, 0), (0, 1)], true);
        assert_eq!(u.dedup(), 2);
        assert_eq!(u.edges, vec![(0, 1)]);
    }

    #[test]
    fn id_map_compacts_sparse_ids() {
        let s = EdgeStream::new(vec![(100, 7), (7, 42)], false);
        let mut map = IdMap::from_stream(&s);
        assert_eq!(map.compact(&s).edges, vec![(2, 0), (0, 1)]);
        assert_eq!(map.format(), "7 0\n42 1\n100 2\n");
        assert_eq!(IdMap::parse(&map.format()).unwrap(), map);
        assert_eq!(map.fresh_original(), 101);
        assert_eq!(map.intern(5), 3);
        assert_eq!(map.original(3), Some(5));
        assert!(IdMap::parse("7 1\n").is_err());
    }

    #[test]
    fn snapshot_arithmetic() {
        let s = EdgeStream::new((0..100).map(|i| (i, i + 1)).collect(), false);
        let plan = SnapshotPlan {
            initial_fraction: 0.5,
            snapshot_count: 10,
            rng_seed: 7,
        };
        let snaps = make_snapshots(&s, &plan).unwrap();
        assert_eq!(snaps.initial.len(), 50);
        assert_eq!(snaps.batches.len(), 10);
        assert!(snaps.batches.iter().all(|b| b.len() == 5));
        assert_eq!(make_snapshots(&s, &plan).unwrap(), snaps);

        let s = EdgeStream::new((0..101).map(|i| (i, i + 1)).collect(), false);
        let snaps = make_snapshots(&s, &plan).unwrap();
        assert_eq!(snaps.initial.len(), 50);
        assert!(snaps.batches[..9].iter().all(|b| b.len() == 5));
        assert_eq!(snaps.batches[9].len(), 6);

        let short = EdgeStream::new(vec![(0, 1), (1, 2), (2, 3)], false);
        assert!(matches!(
            make_snapshots(&short, &plan),
            Err(Error::StreamTooShort(_))
        ));
        let bad = SnapshotPlan {
            initial_fraction: 1.0,
            ..plan
        };
        assert!(make_snapshots(&s, &bad).is_err());
    }

    #[test]
    fn delete_batch_examples() {
        let g = random_digraph(20, 60, 1).to_graph(false).unwrap().0;
        let all = random_delete_batch(&g, g.edge_count(), 3).unwrap();
        let mut gg = g.clone();
        gg.apply_batch(&all, true).unwrap();
        assert_eq!(gg.edge_count(), 0);

        assert!(random_delete_batch(&g, 0, 3).unwrap().is_empty());
        assert!(random_delete_batch(&g, g.edge_count() + 1, 3).is_err());

        let ops = random_delete_batch(&g, 25, 9).unwrap();
        assert_eq!(ops, random_delete_batch(&g, 25, 9).unwrap());
        let mut distinct = HashSet::new();
        for op in &ops {
            let UpdateOp::DeleteEdge(u, v) = *op else {
                panic!()
            };
            // Brute-force membership against the arc list.
            assert!(g.edges().any(|e| e == (u, v)));
            assert!(distinct.insert((u, v)));
        }
    }

    #[test]
    fn undirected_delete_batch_samples_logical_edges() {
        let s = EdgeStream::new(vec![(0, 1), (1, 2), (2, 3)], true);
        let g = s.to_graph(false).unwrap().0;
        assert_eq!(g.edge_count(), 6);
        let ops = random_delete_batch(&g, 3, 0).unwrap();
        let mut gg = g.clone();
        gg.apply_batch(&ops, true).unwrap();
        assert_eq!(gg.edge_count(), 0);
        assert!(random_delete_batch(&g, 4, 0).is_err());
    }

    #[test]
    fn power_law_generator_shape() {
        let s = power_law_digraph(2000, 5, 0.5, 11);
        let g = s.to_graph(false).unwrap().0;
        assert_eq!(g.node_count(), 2000);
        let max_in = g.nodes().map(|u| g.in_neighbors(u).len()).max().unwrap();
        // Heavy tail: the largest hub is far above the mean in-degree.
        let mean = g.edge_count() as f64 / 2000.0;
        assert!(max_in as f64 > 10.0 * mean, "max {max_in}, mean {mean}");
        assert_eq!(s, power_law_digraph(2000, 5, 0.5, 11));
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(edges in prop::collection::vec((0usize..1000, 0usize..1000), 0..50)) {
            let s = EdgeStream::new(edges, false);
            prop_assert_eq!(parse_edge_list(&format_edge_list(&s), false).unwrap(), s);
        }

        #[test]
        fn snapshots_partition_the_shuffled_stream(len in 12usize..200, k in 1usize..6, seed in any::<u64>()) {
            let s = EdgeStream::new((0..len).map(|i| (i, i + 1)).collect(), false);
            let plan = SnapshotPlan { initial_fraction: 0.5, snapshot_count: k, rng_seed: seed };
            let snaps = make_snapshots(&s, &plan).unwrap();
            let mut shuffled = s.edges.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let mut rebuilt = snaps.initial.clone();
            for batch in &snaps.batches {
                prop_assert!(!batch.is_empty());
                for op in batch {
                    let UpdateOp::InsertEdge(u, v) = *op else { panic!() };
                    rebuilt.push((u.index(), v.index()));
                }
            }
            prop_assert_eq!(rebuilt, shuffled);
        }
    }
}
