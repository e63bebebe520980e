#![allow(dead_code)]

use std::collections::BTreeSet;

use dynrwr::stream::random_digraph;
use dynrwr::{DynamicGraph, NodeId, UpdateOp};
use rand::seq::IteratorRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random digraph with `n` in `nodes` and `density` arcs per node on average.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    nodes: std::ops::RangeInclusive<usize>,
    density: std::ops::RangeInclusive<usize>,
) -> DynamicGraph {
    let n = rng.gen_range(nodes);
    let m = (n * rng.gen_range(density)).min(n * n);
    random_digraph(n, m, rng.gen()).to_graph(false).unwrap().0
}

/// A live node that has at least one out-edge, if any.
pub fn seed_with_out_edges(graph: &DynamicGraph, rng: &mut ChaCha8Rng) -> Option<NodeId> {
    graph
        .nodes()
        .filter(|&u| graph.out_degree(u) > 0)
        .choose(rng)
}

/// `count` edge insertions and deletions that are valid when applied in order.
pub fn mixed_edge_ops(graph: &DynamicGraph, count: usize, rng: &mut ChaCha8Rng) -> Vec<UpdateOp> {
    let live: Vec<usize> = graph.nodes().map(|u| u.index()).collect();
    let mut edges: BTreeSet<(usize, usize)> =
        graph.edges().map(|(u, v)| (u.index(), v.index())).collect();
    let mut ops = Vec::with_capacity(count);
    while ops.len() < count {
        if rng.gen_bool(0.5) && !edges.is_empty() {
            let e = *edges.iter().choose(rng).unwrap();
            edges.remove(&e);
            ops.push(UpdateOp::delete(e.0, e.1));
        } else {
            let u = live[rng.gen_range(0..live.len())];
            let v = live[rng.gen_range(0..live.len())];
            if edges.insert((u, v)) {
                ops.push(UpdateOp::insert(u, v));
            }
        }
    }
    ops
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
