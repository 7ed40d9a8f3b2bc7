use std::sync::atomic::{AtomicU32, AtomicU64, AtomicUsize, Ordering};

use crate::cost::update_historical;
use crate::rrg::{NodeId, NODE_CAPACITY};

/// Shared per-node congestion counters.
///
/// Occupancy counts distinct nets on a node. Updates are atomic so
/// concurrent tasks never corrupt counters; readers may see stale values.
/// Historical cost is only written between iterations.
pub struct CongestionMap {
    occupancy: Vec<AtomicU32>,
    historical: Vec<AtomicU64>,
    overused: AtomicUsize,
}

impl CongestionMap {
    pub fn new(nodes: usize) -> Self {
        Self {
            occupancy: (0..nodes).map(|_| AtomicU32::new(0)).collect(),
            historical: (0..nodes).map(|_| AtomicU64::new(1f64.to_bits())).collect(),
            overused: AtomicUsize::new(0),
        }
    }

    pub fn len(&self) -> usize {
        self.occupancy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupancy.is_empty()
    }

    pub fn occupancy(&self, node: NodeId) -> u32 {
        self.occupancy[node as usize].load(Ordering::Relaxed)
    }

    pub fn historical(&self, node: NodeId) -> f64 {
        f64::from_bits(self.historical[node as usize].load(Ordering::Relaxed))
    }

    /// A net starts using `node`.
    pub fn add_net(&self, node: NodeId) {
        let prev = self.occupancy[node as usize].fetch_add(1, Ordering::AcqRel);
        if prev == NODE_CAPACITY {
            self.overused.fetch_add(1, Ordering::AcqRel);
        }
    }

    /// A net stops using `node`.
    pub fn remove_net(&self, node: NodeId) {
        let prev = self.occupancy[node as usize].fetch_sub(1, Ordering::AcqRel);
        debug_assert!(prev > 0, "occupancy underflow on node {node}");
        if prev == NODE_CAPACITY + 1 {
            self.overused.fetch_sub(1, Ordering::AcqRel);
        }
    }

    /// Incrementally tracked count of nodes above capacity.
    pub fn overused(&self) -> usize {
        self.overused.load(Ordering::Acquire)
    }

    pub fn recount_overused(&self) -> usize {
        self.occupancy.iter().filter(|o| o.load(Ordering::Relaxed) > NODE_CAPACITY).count()
    }

    pub fn is_overused(&self, node: NodeId) -> bool {
        self.occupancy(node) > NODE_CAPACITY
    }

    /// Adds `hf·(occ-1)` to every over-occupied node. Must run while no
    /// routing task is in flight.
    pub fn accumulate_historical(&self, hf: f64) {
        for (occ, h) in self.occupancy.iter().zip(&self.historical) {
            let occ = occ.load(Ordering::Relaxed);
            if occ > NODE_CAPACITY {
                let prev = f64::from_bits(h.load(Ordering::Relaxed));
                h.store(update_historical(prev, occ, hf).to_bits(), Ordering::Relaxed);
            }
        }
    }

    pub fn occupancy_snapshot(&self) -> Vec<u32> {
        self.occupancy.iter().map(|o| o.load(Ordering::Relaxed)).collect()
    }

    pub fn historical_snapshot(&self) -> Vec<f64> {
        self.historical.iter().map(|h| f64::from_bits(h.load(Ordering::Relaxed))).collect()
    }
}
