//! Independent oracles shared by the integration tests. Nothing here calls
//! into the router, partitioner or cost code it is used to check.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use parroute::rptt::{Axis, PartitionItem};
use parroute::{NodeId, RoutingGraph};

/// Orders f64 keys for the oracle heap; all costs are finite.
#[derive(Clone, Copy, PartialEq)]
struct Key(f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Key {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Plain Dijkstra over the whole device with uncongested base costs.
/// Pins other than `sink` are never passed through.
pub fn dijkstra(graph: &RoutingGraph, source: NodeId, sink: NodeId) -> Option<f64> {
    let mut dist: HashMap<NodeId, f64> = HashMap::from([(source, 0.0)]);
    let mut heap = BinaryHeap::from([Reverse((Key(0.0), source))]);
    while let Some(Reverse((Key(d), n))) = heap.pop() {
        if n == sink {
            return Some(d);
        }
        if d > dist[&n] {
            continue;
        }
        for &m in graph.successors(n) {
            let node = graph.node(m);
            if node.length == 0 && m != sink {
                continue;
            }
            let nd = d + node.base_cost;
            if dist.get(&m).is_none_or(|&old| nd < old) {
                dist.insert(m, nd);
                heap.push(Reverse((Key(nd), m)));
            }
        }
    }
    None
}

/// Cheapest cost from every node to `sink`, excluding the starting node's
/// own cost. Runs Dijkstra on reversed edges.
pub fn cost_to_sink(graph: &RoutingGraph, sink: NodeId) -> Vec<f64> {
    let n = graph.node_count();
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (s, d) in graph.edges() {
        preds[d as usize].push(s);
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[sink as usize] = 0.0;
    let mut heap = BinaryHeap::from([Reverse((Key(0.0), sink))]);
    while let Some(Reverse((Key(d), v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        // Entering v costs its base cost; a pin other than the sink cannot
        // be an intermediate hop.
        if v != sink && graph.node(v).length == 0 {
            continue;
        }
        let enter = graph.node(v).base_cost;
        for &u in &preds[v as usize] {
            let nd = d + enter;
            if nd < dist[u as usize] {
                dist[u as usize] = nd;
                heap.push(Reverse((Key(nd), u)));
            }
        }
    }
    dist
}

/// Every simple path from `source` to `sink` that avoids foreign pins.
pub fn simple_paths(graph: &RoutingGraph, source: NodeId, sink: NodeId, max_len: usize) -> Vec<Vec<NodeId>> {
    fn dfs(g: &RoutingGraph, at: NodeId, sink: NodeId, max_len: usize, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        if at == sink {
            out.push(path.clone());
            return;
        }
        if path.len() >= max_len {
            return;
        }
        for &m in g.successors(at) {
            if path.contains(&m) || (g.node(m).length == 0 && m != sink) {
                continue;
            }
            path.push(m);
            dfs(g, m, sink, max_len, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    dfs(graph, source, sink, max_len, &mut vec![source], &mut out);
    out
}

pub fn path_cost(graph: &RoutingGraph, path: &[NodeId]) -> f64 {
    path.iter().skip(1).map(|&n| graph.node(n).base_cost).sum()
}

pub fn union_wirelength(graph: &RoutingGraph, paths: &[&Vec<NodeId>]) -> u64 {
    let nodes: BTreeSet<NodeId> = paths.iter().flat_map(|p| p.iter().copied()).collect();
    nodes.iter().map(|&n| u64::from(graph.node(n).length)).sum()
}

fn lo_hi(b: &parroute::BBox, axis: Axis) -> (i32, i32) {
    match axis {
        Axis::X => (b.x_min, b.x_max),
        Axis::Y => (b.y_min, b.y_max),
    }
}

/// Result of the brute-force cutline search: (success, diff, cutline,
/// |left|, |mid|, |right|).
pub type CutSummary = (bool, usize, i32, usize, usize, usize);

/// Tries every candidate cutline by direct counting and keeps the first
/// one with the smallest `|after - before|`.
pub fn brute_force_axis(items: &[PartitionItem], axis: Axis) -> Option<CutSummary> {
    let lo = items.iter().map(|c| lo_hi(&c.bbox, axis).0).min()?;
    let hi = items.iter().map(|c| lo_hi(&c.bbox, axis).1).max()?;
    let mut best: Option<CutSummary> = None;
    for cut in lo..=hi {
        let left = items.iter().filter(|c| lo_hi(&c.bbox, axis).1 <= cut).count();
        let right = items.iter().filter(|c| lo_hi(&c.bbox, axis).0 > cut).count();
        let diff = left.abs_diff(right);
        if best.is_none_or(|b| diff < b.1) {
            best = Some((left > 0 && right > 0, diff, cut, left, items.len() - left - right, right));
        }
    }
    best
}

/// Both axes; an axis that leaves a side empty loses, and Y wins ties.
pub fn brute_force_cut(items: &[PartitionItem]) -> Option<(Axis, CutSummary)> {
    let x = brute_force_axis(items, Axis::X)?;
    let y = brute_force_axis(items, Axis::Y)?;
    let eff = |c: &CutSummary| if c.0 { c.1 } else { usize::MAX };
    Some(if eff(&x) < eff(&y) { (Axis::X, x) } else { (Axis::Y, y) })
}
