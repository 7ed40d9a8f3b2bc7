//! Node cost arithmetic and the hybrid congestion-coefficient schedule.
//!
//! Routing starts present-centric: the present-congestion factor grows by
//! `pf` every iteration while historical cost accumulates at `hf`. A design
//! whose overused-node to connection ratio after the first iteration exceeds
//! `congestion_threshold` is treated as congested; once such a design passes
//! `switch_iteration`, the schedule turns historical-centric and the
//! coefficients become `alpha` (present growth) and `beta` (historical
//! growth).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rrg::{NodeId, RoutingGraph, NODE_CAPACITY};

/// `b·h·p / (1 + share)`; `share` counts connections of the same net
/// already on the node.
pub fn node_use_cost(base: f64, historical: f64, present: f64, share: u32) -> f64 {
    base * historical * present / (1.0 + f64::from(share))
}

/// Classic PathFinder node cost `(b + h)·p`.
pub fn legacy_node_cost(base: f64, historical: f64, present: f64) -> f64 {
    (base + historical) * present
}

pub fn total_cost(prev: f64, estimate: f64, node: f64) -> f64 {
    prev + estimate + node
}

/// Manhattan lower bound on the remaining cost from `node` to `sink`.
///
/// Distance is measured from the tile where `node` drives its successors,
/// scaled by the cheapest per-tile base cost in the graph.
pub fn estimate_to_sink(graph: &RoutingGraph, node: NodeId, sink: NodeId, weight: f64) -> f64 {
    if node == sink {
        return 0.0;
    }
    let d = graph.node(node).exit().manhattan(graph.node(sink).anchor());
    weight * f64::from(d) * graph.min_unit_cost()
}

pub fn update_historical(h_prev: f64, occupancy: u32, hf: f64) -> f64 {
    if occupancy > 1 {
        h_prev + hf * f64::from(occupancy - 1)
    } else {
        h_prev
    }
}

/// `occupancy` is the node's occupancy if the connection being routed were
/// to take it. A node within capacity costs nothing extra.
pub fn present_cost(iteration: u32, occupancy: u32, p0: f64, pf: f64) -> f64 {
    present_cost_from_factor(p0 * pf.powi(iteration as i32 - 1), occupancy)
}

/// Same as [`present_cost`] with `p0·pf^(i-1)` already folded into `factor`.
pub fn present_cost_from_factor(factor: f64, occupancy: u32) -> f64 {
    if occupancy <= NODE_CAPACITY {
        1.0
    } else {
        1.0 + factor * f64::from(occupancy)
    }
}

pub fn classify_congested(overused_nodes: usize, connections: usize, threshold: f64) -> bool {
    connections > 0 && overused_nodes as f64 / connections as f64 > threshold
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostConfig {
    pub p0: f64,
    pub pf: f64,
    pub hf: f64,
    pub alpha: f64,
    pub beta: f64,
    pub congestion_threshold: f64,
    pub switch_iteration: u32,
    pub astar_weight: f64,
    pub legacy_mode: bool,
    /// Enables the switch to historical-centric updating.
    pub hus: bool,
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            p0: 0.5,
            pf: 2.0,
            hf: 1.0,
            alpha: 1.1,
            beta: 2.0,
            congestion_threshold: 0.05,
            switch_iteration: 3,
            astar_weight: 1.0,
            legacy_mode: false,
            hus: true,
        }
    }
}

impl CostConfig {
    // Negated comparisons so that NaN fails every check.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.p0 > 0.0) {
            return bad(format!("p0 must be positive, got {}", self.p0));
        }
        if !(self.pf >= 1.0) {
            return bad(format!("pf must be at least 1, got {}", self.pf));
        }
        if !(self.hf > 0.0) {
            return bad(format!("hf must be positive, got {}", self.hf));
        }
        if !(self.alpha < self.pf) {
            return bad(format!("alpha ({}) must be below pf ({})", self.alpha, self.pf));
        }
        if !(self.beta > self.hf) {
            return bad(format!("beta ({}) must exceed hf ({})", self.beta, self.hf));
        }
        if !(self.alpha >= 1.0) {
            return bad(format!("alpha must be at least 1, got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.congestion_threshold) {
            return bad(format!("congestion threshold {} outside [0, 1]", self.congestion_threshold));
        }
        if !(self.astar_weight >= 1.0) {
            return bad(format!("A* weight must be at least 1, got {}", self.astar_weight));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    PresentCentric,
    HistoricalCentric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostState {
    pub iteration: u32,
    pub phase: Phase,
    pub effective_pf: f64,
    pub effective_hf: f64,
    /// `p0` times the product of the effective `pf` of every iteration so
    /// far. Equals `p0·pf^(i-1)` while `pf` is constant.
    pub present_factor: f64,
    pub congested_design: bool,
}

impl CostState {
    pub fn new(config: &CostConfig) -> Self {
        Self {
            iteration: 1,
            phase: Phase::PresentCentric,
            effective_pf: config.pf,
            effective_hf: config.hf,
            present_factor: config.p0,
            congested_design: false,
        }
    }

    /// Moves to the next iteration. Historical costs are the caller's job:
    /// apply [`update_historical`] with `effective_hf` before advancing.
    pub fn advance(&self, config: &CostConfig, overused_nodes: usize, connections: usize) -> Self {
        let mut next = self.clone();
        next.iteration += 1;
        if self.iteration == 1 {
            next.congested_design = classify_congested(overused_nodes, connections, config.congestion_threshold);
        }
        if config.hus && next.congested_design && next.iteration > config.switch_iteration {
            next.phase = Phase::HistoricalCentric;
            next.effective_pf = config.alpha;
            next.effective_hf = config.beta;
        }
        next.present_factor = self.present_factor * next.effective_pf;
        next
    }

    pub fn present(&self, occupancy: u32) -> f64 {
        present_cost_from_factor(self.present_factor, occupancy)
    }
}
