//! Mutable directed graph with batch updates and row-level change records.
//!
//! Transition matrices are never materialized. Row `u` of the row-normalized
//! matrix holds `1 / out_degree(u)` at every out-neighbor and is all-zero
//! when `u` is a dead-end. A batch application returns a [`RowChangeSet`]
//! holding before/after snapshots of every row it modified, which is all the
//! offset computation needs to know about the difference between the two
//! matrices.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Dense node index in `0..node_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(v: usize) -> Self {
        NodeId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateOp {
    InsertEdge(NodeId, NodeId),
    DeleteEdge(NodeId, NodeId),
    /// Appends a node; its id is the node count at application time.
    InsertNode,
    DeleteNode(NodeId),
}

impl UpdateOp {
    pub fn insert(src: usize, dst: usize) -> Self {
        UpdateOp::InsertEdge(NodeId(src), NodeId(dst))
    }

    pub fn delete(src: usize, dst: usize) -> Self {
        UpdateOp::DeleteEdge(NodeId(src), NodeId(dst))
    }

    /// The op that undoes this one, for edge ops.
    pub fn inverse(&self) -> Option<UpdateOp> {
        match *self {
            UpdateOp::InsertEdge(u, v) => Some(UpdateOp::DeleteEdge(u, v)),
            UpdateOp::DeleteEdge(u, v) => Some(UpdateOp::InsertEdge(u, v)),
            UpdateOp::InsertNode | UpdateOp::DeleteNode(_) => None,
        }
    }
}

/// Before/after snapshot of one out-neighbor row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowChange {
    pub node: NodeId,
    pub old_neighbors: Vec<NodeId>,
    pub new_neighbors: Vec<NodeId>,
}

impl RowChange {
    pub fn old_degree(&self) -> usize {
        self.old_neighbors.len()
    }

    pub fn new_degree(&self) -> usize {
        self.new_neighbors.len()
    }

    pub fn is_unchanged(&self) -> bool {
        self.old_neighbors == self.new_neighbors
    }

    /// Total variation of the normalized row: `Σ_j |new_j − old_j|`.
    ///
    /// Snapshots are sorted, so this is a single merge pass.
    pub fn diagonal_weight(&self) -> f64 {
        let old_w = weight(self.old_degree());
        let new_w = weight(self.new_degree());
        let (old, new) = (&self.old_neighbors, &self.new_neighbors);
        let (mut i, mut j) = (0, 0);
        let mut total = 0.0;
        while i < old.len() || j < new.len() {
            match (old.get(i), new.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    total += (new_w - old_w).abs();
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    total += old_w;
                    i += 1;
                }
                (Some(_), None) => {
                    total += old_w;
                    i += 1;
                }
                _ => {
                    total += new_w;
                    j += 1;
                }
            }
        }
        total
    }
}

fn weight(degree: usize) -> f64 {
    if degree == 0 {
        0.0
    } else {
        1.0 / degree as f64
    }
}

/// Every row touched by one batch, keyed by source node in ascending order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RowChangeSet {
    rows: BTreeMap<NodeId, RowChange>,
    node_count_before: usize,
    node_count_after: usize,
    deleted_nodes: Vec<NodeId>,
}

impl RowChangeSet {
    pub fn rows(&self) -> impl Iterator<Item = &RowChange> {
        self.rows.values()
    }

    pub fn row(&self, node: NodeId) -> Option<&RowChange> {
        self.rows.get(&node)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn node_count_before(&self) -> usize {
        self.node_count_before
    }

    pub fn node_count_after(&self) -> usize {
        self.node_count_after
    }

    pub fn deleted_nodes(&self) -> &[NodeId] {
        &self.deleted_nodes
    }

    /// Number of rows whose normalized content actually differs.
    pub fn modified_row_count(&self) -> usize {
        self.rows.values().filter(|r| !r.is_unchanged()).count()
    }
}

/// `(1 − c) · Σ_u D_uu · r_old[u]`, an upper bound on the offset seed mass.
pub fn row_change_l1(changes: &RowChangeSet, r_old: &[f64], c: f64) -> Result<f64> {
    if r_old.len() != changes.node_count_after {
        return Err(Error::LengthMismatch {
            expected: changes.node_count_after,
            actual: r_old.len(),
        });
    }
    let sum: f64 = changes
        .rows()
        .map(|row| row.diagonal_weight() * r_old[row.node.index()])
        .sum();
    Ok((1.0 - c) * sum)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicGraph {
    out_neighbors: Vec<Vec<NodeId>>,
    in_neighbors: Vec<Vec<NodeId>>,
    alive: Vec<bool>,
    edge_count: usize,
    undirected: bool,
}

impl DynamicGraph {
    pub fn new(node_count: usize, undirected: bool) -> Self {
        DynamicGraph {
            out_neighbors: vec![Vec::new(); node_count],
            in_neighbors: vec![Vec::new(); node_count],
            alive: vec![true; node_count],
            edge_count: 0,
            undirected,
        }
    }

    /// Builds a graph from `(src, dst)` pairs.
    ///
    /// With `lenient` set, duplicate edges are skipped and counted; otherwise
    /// the first duplicate is an error. Returns the graph and the skip count.
    pub fn from_edges(
        node_count: usize,
        edges: &[(usize, usize)],
        undirected: bool,
        lenient: bool,
    ) -> Result<(Self, usize)> {
        let mut g = DynamicGraph::new(node_count, undirected);
        let mut skipped = 0;
        for &(u, v) in edges {
            let (u, v) = (NodeId(u), NodeId(v));
            g.check_node(u)?;
            g.check_node(v)?;
            if g.has_edge(u, v) {
                if lenient {
                    skipped += 1;
                    continue;
                }
                return Err(Error::EdgeExists(u, v));
            }
            g.link(u, v);
            if undirected && u != v {
                g.link(v, u);
            }
        }
        Ok((g, skipped))
    }

    pub fn node_count(&self) -> usize {
        self.out_neighbors.len()
    }

    /// Directed arc count; each undirected edge contributes two arcs.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    pub fn is_alive(&self, u: NodeId) -> bool {
        self.alive.get(u.index()).copied().unwrap_or(false)
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_neighbors[u.index()].len()
    }

    pub fn out_neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.out_neighbors[u.index()]
    }

    pub fn in_neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.in_neighbors[u.index()]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_neighbors[u.index()].binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId)
    }

    /// All arcs in ascending `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, outs)| outs.iter().map(move |&v| (NodeId(u), v)))
    }

    pub fn dead_end_count(&self) -> usize {
        self.out_neighbors.iter().filter(|o| o.is_empty()).count()
    }

    pub fn add_node(&mut self) -> NodeId {
        let id = NodeId(self.node_count());
        self.out_neighbors.push(Vec::new());
        self.in_neighbors.push(Vec::new());
        self.alive.push(true);
        id
    }

    /// Applies `ops` in order and returns the rows they modified.
    ///
    /// In strict mode an inapplicable op (duplicate insert, missing delete)
    /// is an error; in lenient mode it is skipped. Invalid node ids are
    /// always an error. On error the graph is restored to its state before
    /// the batch.
    pub fn apply_batch(&mut self, ops: &[UpdateOp], strict: bool) -> Result<RowChangeSet> {
        let before = self.node_count();
        let mut batch = Batch {
            rows: BTreeMap::new(),
            deleted: Vec::new(),
        };
        for op in ops {
            if let Err(e) = self.apply_op(*op, strict, &mut batch) {
                self.rollback(before, &batch);
                return Err(e);
            }
        }
        let rows = batch
            .rows
            .into_iter()
            .map(|(node, old)| {
                let row = RowChange {
                    node,
                    old_neighbors: old,
                    new_neighbors: self.out_neighbors[node.index()].clone(),
                };
                (node, row)
            })
            .collect();
        Ok(RowChangeSet {
            rows,
            node_count_before: before,
            node_count_after: self.node_count(),
            deleted_nodes: batch.deleted,
        })
    }

    fn apply_op(&mut self, op: UpdateOp, strict: bool, batch: &mut Batch) -> Result<()> {
        match op {
            UpdateOp::InsertNode => {
                self.add_node();
            }
            UpdateOp::InsertEdge(u, v) => {
                self.check_node(u)?;
                self.check_node(v)?;
                if self.has_edge(u, v) {
                    return if strict {
                        Err(Error::EdgeExists(u, v))
                    } else {
                        Ok(())
                    };
                }
                batch.touch(self, u);
                self.link(u, v);
                if self.undirected && u != v {
                    batch.touch(self, v);
                    self.link(v, u);
                }
            }
            UpdateOp::DeleteEdge(u, v) => {
                self.check_node(u)?;
                self.check_node(v)?;
                if !self.has_edge(u, v) {
                    return if strict {
                        Err(Error::EdgeMissing(u, v))
                    } else {
                        Ok(())
                    };
                }
                batch.touch(self, u);
                self.unlink(u, v);
                if self.undirected && u != v {
                    batch.touch(self, v);
                    self.unlink(v, u);
                }
            }
            UpdateOp::DeleteNode(u) => {
                self.check_node(u)?;
                batch.touch(self, u);
                let preds = self.in_neighbors[u.index()].clone();
                for p in preds {
                    batch.touch(self, p);
                    self.unlink(p, u);
                }
                let succs = self.out_neighbors[u.index()].clone();
                for s in succs {
                    self.unlink(u, s);
                }
                self.alive[u.index()] = false;
                batch.deleted.push(u);
            }
        }
        Ok(())
    }

    fn rollback(&mut self, node_count: usize, batch: &Batch) {
        for (&u, old) in &batch.rows {
            for v in self.out_neighbors[u.index()].clone() {
                self.unlink(u, v);
            }
            for &v in old {
                self.link(u, v);
            }
        }
        for &u in &batch.deleted {
            self.alive[u.index()] = true;
        }
        self.out_neighbors.truncate(node_count);
        self.in_neighbors.truncate(node_count);
        self.alive.truncate(node_count);
    }

    fn check_node(&self, u: NodeId) -> Result<()> {
        if self.is_alive(u) {
            Ok(())
        } else {
            Err(Error::InvalidNode(u))
        }
    }

    fn link(&mut self, u: NodeId, v: NodeId) {
        let outs = &mut self.out_neighbors[u.index()];
        if let Err(pos) = outs.binary_search(&v) {
            outs.insert(pos, v);
            let ins = &mut self.in_neighbors[v.index()];
            let pos = ins.binary_search(&u).unwrap_err();
            ins.insert(pos, u);
            self.edge_count += 1;
        }
    }

    fn unlink(&mut self, u: NodeId, v: NodeId) {
        let outs = &mut self.out_neighbors[u.index()];
        if let Ok(pos) = outs.binary_search(&v) {
            outs.remove(pos);
            let ins = &mut self.in_neighbors[v.index()];
            let pos = ins.binary_search(&u).expect("mirror lists out of sync");
            ins.remove(pos);
            self.edge_count -= 1;
        }
    }
}

struct Batch {
    rows: BTreeMap<NodeId, Vec<NodeId>>,
    deleted: Vec<NodeId>,
}

impl Batch {
    fn touch(&mut self, g: &DynamicGraph, u: NodeId) {
        self.rows
            .entry(u)
            .or_insert_with(|| g.out_neighbors[u.index()].clone());
    }
}
