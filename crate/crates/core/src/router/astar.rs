use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::cost::estimate_to_sink;
use crate::netlist::BBox;
use crate::rrg::{NodeId, RoutingGraph};

#[derive(Clone, Copy)]
struct Open {
    f: f64,
    g: f64,
    node: NodeId,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Open {
    // BinaryHeap is a max-heap: smallest f first, then deepest g, then id.
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| self.g.total_cmp(&other.g)).then_with(|| other.node.cmp(&self.node))
    }
}

#[derive(Default)]
struct Scratch {
    best: Vec<f64>,
    parent: Vec<NodeId>,
    stamp: Vec<u32>,
    epoch: u32,
    heap: BinaryHeap<Open>,
}

impl Scratch {
    fn reset(&mut self, nodes: usize) {
        if self.stamp.len() != nodes {
            self.best = vec![0.0; nodes];
            self.parent = vec![0; nodes];
            self.stamp = vec![0; nodes];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.heap.clear();
    }
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = RefCell::new(Scratch::default());
}

/// Cheapest path from `source` to `sink` visiting only nodes anchored in
/// `region`. Pins other than the two endpoints are never entered. The
/// returned cost sums `node_cost` over every node after the source.
pub fn search(
    graph: &RoutingGraph,
    source: NodeId,
    sink: NodeId,
    region: BBox,
    weight: f64,
    node_cost: impl Fn(NodeId) -> f64,
) -> Option<(Vec<NodeId>, f64)> {
    if source == sink {
        return Some((Vec::new(), 0.0));
    }
    SCRATCH.with(|cell| {
        let mut s = cell.borrow_mut();
        s.reset(graph.node_count());
        let epoch = s.epoch;
        s.stamp[source as usize] = epoch;
        s.best[source as usize] = 0.0;
        s.parent[source as usize] = source;
        let h0 = estimate_to_sink(graph, source, sink, weight);
        s.heap.push(Open { f: h0, g: 0.0, node: source });

        while let Some(Open { g, node, .. }) = s.heap.pop() {
            if g > s.best[node as usize] {
                continue;
            }
            if node == sink {
                let mut path = vec![sink];
                let mut at = sink;
                while at != source {
                    at = s.parent[at as usize];
                    path.push(at);
                }
                path.reverse();
                return Some((path, g));
            }
            for &next in graph.successors(node) {
                let n = graph.node(next);
                if next != sink && (n.is_pin() || !region.contains(n.anchor())) {
                    continue;
                }
                let ng = g + node_cost(next);
                let i = next as usize;
                if s.stamp[i] != epoch || ng < s.best[i] {
                    s.stamp[i] = epoch;
                    s.best[i] = ng;
                    s.parent[i] = node;
                    let f = ng + estimate_to_sink(graph, next, sink, weight);
                    s.heap.push(Open { f, g: ng, node: next });
                }
            }
        }
        None
    })
}
