//! Parallel negotiated-congestion routing for island-style FPGA routing
//! resource graphs.
//!
//! - [`rrg`]: the routing resource graph, its generator and text format.
//! - [`netlist`]: nets, two-pin connections, benchmark generation.
//! - [`cost`]: node cost terms and the hybrid coefficient schedule.
//! - [`rptt`]: balance-driven cutlines and the ternary partitioning tree.
//! - [`router`]: A*, rip-up and reroute, parallel tree execution.
//! - [`eval`]: validation, wirelength, scoring and reports.

pub mod cost;
pub mod eval;
pub mod netlist;
pub mod router;
pub mod rptt;
pub mod rrg;

pub use cost::{CostConfig, CostState, Phase};
pub use eval::{score, validate, wirelength, RoutingReport, Solution};
pub use netlist::{BBox, BenchmarkSpec, Connection, Net, Netlist};
pub use router::{route_all, RouteError, Router, RouterConfig, RoutingResult};
pub use rptt::{balance_cut, build_tree, RpttNode, TreeShape};
pub use rrg::{generate_grid, GridSpec, NodeId, RoutingGraph, RrgNode, Tile};
