//! Connection routing, rip-up, and the negotiation loop.
//!
//! Each iteration reroutes the connections that are unrouted or cross an
//! overused node. Those connections are partitioned into a ternary tree and
//! routed by [`schedule`], then congestion coefficients advance at a full
//! barrier.

mod astar;
mod congestion;
pub mod schedule;

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use parking_lot::{Mutex, MutexGuard};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use web_time::Instant;

use crate::cost::{legacy_node_cost, node_use_cost, ConfigError, CostConfig, CostState, Phase};
use crate::netlist::{BBox, Connection, Netlist};
use crate::rptt::{build_tree_shaped, PartitionItem, RpttNode, TreeShape};
use crate::rrg::{NodeId, RoutingGraph, NODE_CAPACITY};

pub use astar::search;
pub use congestion::CongestionMap;
pub use schedule::{check_schedule, ScheduleCheck, TraceEvent};

pub const DEFAULT_THREADS: usize = 16;
pub const DEFAULT_MAX_ITERATIONS: u32 = 500;

#[derive(Debug, Error)]
pub enum RouteError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("connection {connection} of net {net} cannot reach its sink")]
    Unroutable { connection: u32, net: u32 },
    #[error("routing worker panicked: {0}")]
    WorkerPanic(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouterConfig {
    pub cost: CostConfig,
    pub threads: usize,
    pub max_iterations: u32,
    pub tree_shape: TreeShape,
    /// Search-region doublings tried before falling back to the whole device.
    pub bbox_retries: u32,
    /// Record a timestamped event for every routed connection.
    pub trace: bool,
}

impl Default for RouterConfig {
    fn default() -> Self {
        Self {
            cost: CostConfig::default(),
            threads: DEFAULT_THREADS,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tree_shape: TreeShape::Ternary,
            bbox_retries: 3,
            trace: false,
        }
    }
}

impl RouterConfig {
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.threads == 0 {
            return Err(ConfigError::Invalid("thread count must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(ConfigError::Invalid("max iterations must be at least 1".into()));
        }
        self.cost.validate()
    }
}

/// Routing state of one net: its connections' paths and how many of them
/// use each node (the `share` of the cost function).
#[derive(Debug, Default, Clone)]
pub struct NetRoutes {
    pub usage: HashMap<NodeId, u32>,
    pub paths: Vec<Vec<NodeId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: u32,
    pub rerouted_connections: usize,
    pub overused_nodes: usize,
    pub phase: Phase,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct RoutingResult {
    /// True when the final solution has no overused node.
    pub success: bool,
    /// Path of every connection, indexed like [`Netlist::connections`].
    pub paths: Vec<Vec<NodeId>>,
    pub iterations: Vec<IterationStats>,
    pub overused_nodes: usize,
    pub runtime: Duration,
    pub final_state: CostState,
    /// Per-iteration trees and events; empty unless tracing was enabled.
    pub trace: Vec<(RpttNode, Vec<TraceEvent>)>,
    /// Times a task found its net already locked by another task.
    pub intra_net_conflicts: usize,
}

pub struct Router<'a> {
    graph: &'a RoutingGraph,
    netlist: &'a Netlist,
    config: RouterConfig,
    congestion: CongestionMap,
    nets: Vec<Mutex<NetRoutes>>,
    state: CostState,
    events: Mutex<Vec<TraceEvent>>,
    first_error: Mutex<Option<RouteError>>,
    intra_net_conflicts: AtomicUsize,
    epoch: Instant,
}

impl<'a> Router<'a> {
    pub fn new(graph: &'a RoutingGraph, netlist: &'a Netlist, config: RouterConfig) -> Result<Self, RouteError> {
        config.validate()?;
        let nets = netlist
            .nets()
            .iter()
            .map(|n| Mutex::new(NetRoutes { usage: HashMap::new(), paths: vec![Vec::new(); n.sinks.len()] }))
            .collect();
        Ok(Self {
            graph,
            netlist,
            state: CostState::new(&config.cost),
            config,
            congestion: CongestionMap::new(graph.node_count()),
            nets,
            events: Mutex::new(Vec::new()),
            first_error: Mutex::new(None),
            intra_net_conflicts: AtomicUsize::new(0),
            epoch: Instant::now(),
        })
    }

    pub fn graph(&self) -> &RoutingGraph {
        self.graph
    }

    pub fn netlist(&self) -> &Netlist {
        self.netlist
    }

    pub fn config(&self) -> &RouterConfig {
        &self.config
    }

    pub fn congestion(&self) -> &CongestionMap {
        &self.congestion
    }

    pub fn cost_state(&self) -> &CostState {
        &self.state
    }

    fn lock_net(&self, net: u32) -> MutexGuard<'_, NetRoutes> {
        let m = &self.nets[net as usize];
        match m.try_lock() {
            Some(g) => g,
            None => {
                self.intra_net_conflicts.fetch_add(1, Ordering::Relaxed);
                m.lock()
            }
        }
    }

    pub fn path(&self, conn: u32) -> Vec<NodeId> {
        let c = self.netlist.connection(conn);
        self.nets[c.net_id as usize].lock().paths[c.sink_index as usize].clone()
    }

    pub fn paths(&self) -> Vec<Vec<NodeId>> {
        let mut out = Vec::with_capacity(self.netlist.connections().len());
        for m in &self.nets {
            out.extend(m.lock().paths.iter().cloned());
        }
        out
    }

    pub fn net_usage(&self, net: u32) -> HashMap<NodeId, u32> {
        self.nets[net as usize].lock().usage.clone()
    }

    /// Cost of entering `node` for a connection of the net whose state is
    /// `routes`, under the current congestion coefficients.
    pub fn node_cost(&self, routes: &NetRoutes, node: NodeId) -> f64 {
        let share = routes.usage.get(&node).copied().unwrap_or(0);
        let occ = self.congestion.occupancy(node);
        // Occupancy counts nets; ours is already on the node when share > 0.
        let others = if share > 0 { occ.saturating_sub(1) } else { occ };
        let p = self.state.present(others + 1);
        let h = self.congestion.historical(node);
        let b = self.graph.node(node).base_cost;
        if self.config.cost.legacy_mode {
            legacy_node_cost(b, h, p)
        } else {
            node_use_cost(b, h, p, share)
        }
    }

    fn search_regions(&self, c: &Connection) -> Vec<BBox> {
        let bounds = self.graph.bounds();
        let src = self.graph.node(c.source).anchor();
        let dst = self.graph.node(c.sink).anchor();
        let tight = BBox::of_tile(src).include(dst);
        let margin = self.netlist.margin().max(1);
        let mut regions = vec![c.search_bbox];
        for k in 1..=self.config.bbox_retries {
            let r = tight.expand(margin << k, bounds);
            if regions.last() != Some(&r) {
                regions.push(r);
            }
        }
        if regions.last() != Some(&bounds) {
            regions.push(bounds);
        }
        regions
    }

    /// Rips up any previous route of `conn`, finds the cheapest path under
    /// current costs, and installs it.
    pub fn route_connection(&self, conn: u32) -> Result<Vec<NodeId>, RouteError> {
        let c = *self.netlist.connection(conn);
        let mut routes = self.lock_net(c.net_id);
        self.release(&mut routes, &c);
        if c.source == c.sink {
            return Ok(Vec::new());
        }
        let weight = self.config.cost.astar_weight;
        // A wider region is tried when the sink is unreachable or the best
        // path still overlaps another net; the widest result is the cheapest.
        let mut best = None;
        for region in self.search_regions(&c) {
            if let Some((path, _)) = search(self.graph, c.source, c.sink, region, weight, |n| self.node_cost(&routes, n)) {
                let clean = !self.overlaps_other_net(&routes, &path);
                best = Some(path);
                if clean {
                    break;
                }
            }
        }
        match best {
            Some(path) => {
                self.install(&mut routes, &c, path.clone());
                Ok(path)
            }
            None => Err(RouteError::Unroutable { connection: conn, net: c.net_id }),
        }
    }

    fn overlaps_other_net(&self, routes: &NetRoutes, path: &[NodeId]) -> bool {
        path.iter().any(|&n| {
            let own = u32::from(routes.usage.contains_key(&n));
            self.congestion.occupancy(n).saturating_sub(own) >= NODE_CAPACITY
        })
    }

    /// Releases the resources of `conn`'s route. No-op when unrouted.
    pub fn rip_up(&self, conn: u32) {
        let c = *self.netlist.connection(conn);
        let mut routes = self.lock_net(c.net_id);
        self.release(&mut routes, &c);
    }

    fn install(&self, routes: &mut NetRoutes, c: &Connection, path: Vec<NodeId>) {
        for &n in &path {
            let e = routes.usage.entry(n).or_insert(0);
            if *e == 0 {
                self.congestion.add_net(n);
            }
            *e += 1;
        }
        routes.paths[c.sink_index as usize] = path;
    }

    fn release(&self, routes: &mut NetRoutes, c: &Connection) {
        let path = std::mem::take(&mut routes.paths[c.sink_index as usize]);
        for n in path {
            let e = routes.usage.get_mut(&n).expect("routed node missing from usage map");
            *e -= 1;
            if *e == 0 {
                routes.usage.remove(&n);
                self.congestion.remove_net(n);
            }
        }
    }

    /// Connections that are unrouted or cross an overused node.
    pub fn congested_connections(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (net, m) in self.nets.iter().enumerate() {
            let routes = m.lock();
            let first = self.netlist.net_connections(net as u32).start;
            for (k, path) in routes.paths.iter().enumerate() {
                let c = self.netlist.connection(first + k as u32);
                let unrouted = path.is_empty() && c.source != c.sink;
                if unrouted || path.iter().any(|&n| self.congestion.is_overused(n)) {
                    out.push(first + k as u32);
                }
            }
        }
        out
    }

    fn take_error(&self) -> Option<RouteError> {
        self.first_error.lock().take()
    }

    /// Runs negotiation until no node is overused or the iteration budget
    /// is spent. A budget overrun is reported through `success = false`
    /// with the best-effort paths.
    pub fn route_all(&mut self) -> Result<RoutingResult, RouteError> {
        let start = Instant::now();
        let total = self.netlist.connections().len();
        let pool = schedule::build_pool(self.config.threads)?;

        // Leaf priority: small search regions first, then net id.
        let mut priority: Vec<u32> = (0..total as u32).collect();
        priority.sort_by_key(|&i| {
            let c = self.netlist.connection(i);
            (c.search_bbox.area(), c.net_id, i)
        });
        let mut rank = vec![0u32; total];
        for (r, &i) in priority.iter().enumerate() {
            rank[i as usize] = r as u32;
        }

        let mut iterations = Vec::new();
        let mut trace = Vec::new();
        let mut success = total == 0;
        while !success && self.state.iteration <= self.config.max_iterations {
            let t0 = Instant::now();
            let mut selected = if self.state.iteration == 1 { priority.clone() } else { self.congested_connections() };
            selected.sort_by_key(|&i| rank[i as usize]);
            let items: Vec<PartitionItem> =
                selected.iter().map(|&i| PartitionItem { id: i, bbox: self.netlist.connection(i).bbox }).collect();
            let tree = build_tree_shaped(&items, self.config.tree_shape);

            self.run_tree(&tree, pool.as_ref())?;
            if let Some(e) = self.take_error() {
                return Err(e);
            }

            let overused = self.congestion.overused();
            debug_assert_eq!(overused, self.congestion.recount_overused());
            iterations.push(IterationStats {
                iteration: self.state.iteration,
                rerouted_connections: selected.len(),
                overused_nodes: overused,
                phase: self.state.phase,
                wall_ms: t0.elapsed().as_secs_f64() * 1e3,
            });
            if self.config.trace {
                trace.push((tree, std::mem::take(&mut *self.events.lock())));
            }
            if overused == 0 {
                success = true;
                break;
            }
            self.congestion.accumulate_historical(self.state.effective_hf);
            self.state = self.state.advance(&self.config.cost, overused, total);
        }

        Ok(RoutingResult {
            success,
            paths: self.paths(),
            iterations,
            overused_nodes: self.congestion.overused(),
            runtime: start.elapsed(),
            final_state: self.state.clone(),
            trace,
            intra_net_conflicts: self.intra_net_conflicts.load(Ordering::Relaxed),
        })
    }
}

/// Builds a router and runs it to completion.
pub fn route_all(graph: &RoutingGraph, netlist: &Netlist, config: RouterConfig) -> Result<RoutingResult, RouteError> {
    Router::new(graph, netlist, config)?.route_all()
}
