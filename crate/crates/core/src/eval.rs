//! Solution checking, wirelength, contest-style scoring, and reports.
//!
//! Nothing here reads router state: legality and wirelength are recomputed
//! from the paths alone.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::Netlist;
use crate::router::IterationStats;
use crate::rrg::{NodeId, RoutingGraph, NODE_CAPACITY};

pub const RUNTIME_WEIGHT: f64 = 0.9;
pub const WIRELENGTH_WEIGHT: f64 = 0.1;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("report: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Paths of every connection, indexed like [`Netlist::connections`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub paths: Vec<Vec<NodeId>>,
}

impl Solution {
    pub fn new(paths: Vec<Vec<NodeId>>) -> Self {
        Self { paths }
    }

    pub fn to_text(&self, netlist: &Netlist) -> String {
        let mut out = String::new();
        for (c, path) in netlist.connections().iter().zip(&self.paths) {
            write!(out, "PATH {} {}", c.net_id, c.sink_index).unwrap();
            for n in path {
                write!(out, " {n}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses `PATH <net> <conn> <node>*` lines. Connections without a line
    /// stay unrouted.
    pub fn from_reader(reader: impl BufRead, graph: &RoutingGraph, netlist: &Netlist) -> Result<Self, EvalError> {
        let mut paths = vec![Vec::new(); netlist.connections().len()];
        let mut seen = vec![false; paths.len()];
        for (i, line) in reader.lines().enumerate() {
            let (no, line) = (i + 1, line?);
            let err = |message: String| EvalError::Parse { line: no, message };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.is_empty() {
                continue;
            }
            if f[0] != "PATH" || f.len() < 3 {
                return Err(err(format!("expected `PATH <net> <conn> <node>*`, got `{line}`")));
            }
            let net: u32 = f[1].parse().map_err(|_| err(format!("bad net id `{}`", f[1])))?;
            let k: u32 = f[2].parse().map_err(|_| err(format!("bad connection index `{}`", f[2])))?;
            if net as usize >= netlist.nets().len() {
                return Err(err(format!("unknown net {net}")));
            }
            let range = netlist.net_connections(net);
            if k >= range.end - range.start {
                return Err(err(format!("net {net} has no connection {k}")));
            }
            let idx = (range.start + k) as usize;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(err(format!("duplicate path for net {net} connection {k}")));
            }
            for s in &f[3..] {
                let n: u64 = s.parse().map_err(|_| err(format!("bad node id `{s}`")))?;
                if n as usize >= graph.node_count() {
                    return Err(err(format!("unknown node {n}")));
                }
                paths[idx].push(n as NodeId);
            }
        }
        Ok(Self { paths })
    }
}

pub fn save_solution(solution: &Solution, netlist: &Netlist, path: impl AsRef<Path>) -> Result<(), EvalError> {
    fs::write(path, solution.to_text(netlist))?;
    Ok(())
}

pub fn load_solution(path: impl AsRef<Path>, graph: &RoutingGraph, netlist: &Netlist) -> Result<Solution, EvalError> {
    Solution::from_reader(BufReader::new(fs::File::open(path)?), graph, netlist)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Overflow { node: NodeId, nets: Vec<u32> },
    Unrouted { connection: u32 },
    WrongEndpoints { connection: u32 },
    MissingEdge { connection: u32, from: NodeId, to: NodeId },
    UnknownNode { connection: u32, node: NodeId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Validation {
    pub overflow_nodes: usize,
    pub disconnected_connections: usize,
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_legal(&self) -> bool {
        self.overflow_nodes == 0 && self.disconnected_connections == 0
    }
}

/// Recomputes occupancy from the paths (a net counts once per node) and
/// checks that every path runs from its source to its sink along edges.
pub fn validate(graph: &RoutingGraph, netlist: &Netlist, solution: &Solution) -> Validation {
    let mut v = Validation::default();
    let mut nets_on: HashMap<NodeId, Vec<u32>> = HashMap::new();

    for (c, path) in netlist.connections().iter().zip(solution.paths.iter().chain(std::iter::repeat(&Vec::new()))) {
        if let Some(&bad) = path.iter().find(|&&n| n as usize >= graph.node_count()) {
            v.violations.push(Violation::UnknownNode { connection: c.index, node: bad });
            v.disconnected_connections += 1;
            continue;
        }
        for &n in path {
            let nets = nets_on.entry(n).or_default();
            if !nets.contains(&c.net_id) {
                nets.push(c.net_id);
            }
        }
        let broken = if path.is_empty() {
            (c.source != c.sink).then_some(Violation::Unrouted { connection: c.index })
        } else if path[0] != c.source || path[path.len() - 1] != c.sink {
            Some(Violation::WrongEndpoints { connection: c.index })
        } else {
            path.windows(2).find(|w| !graph.has_edge(w[0], w[1])).map(|w| Violation::MissingEdge {
                connection: c.index,
                from: w[0],
                to: w[1],
            })
        };
        if let Some(b) = broken {
            v.violations.push(b);
            v.disconnected_connections += 1;
        }
    }

    let mut overflow: Vec<_> = nets_on.into_iter().filter(|(_, nets)| nets.len() as u32 > NODE_CAPACITY).collect();
    overflow.sort_unstable_by_key(|(n, _)| *n);
    v.overflow_nodes = overflow.len();
    v.violations.extend(overflow.into_iter().map(|(node, nets)| Violation::Overflow { node, nets }));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Wirelength {
    /// Sum over nets of the lengths of their distinct nodes.
    pub total: u64,
    /// Longest single connection.
    pub critical_path: u64,
}

pub fn connection_wirelength(graph: &RoutingGraph, path: &[NodeId]) -> u64 {
    path.iter().map(|&n| u64::from(graph.node(n).length)).sum()
}

pub fn wirelength(graph: &RoutingGraph, netlist: &Netlist, solution: &Solution) -> Wirelength {
    let mut wl = Wirelength::default();
    for net in netlist.nets() {
        let mut seen = HashSet::new();
        for idx in netlist.net_connections(net.id) {
            let Some(path) = solution.paths.get(idx as usize) else { continue };
            wl.critical_path = wl.critical_path.max(connection_wirelength(graph, path));
            wl.total += path.iter().filter(|&&n| seen.insert(n)).map(|&n| u64::from(graph.node(n).length)).sum::<u64>();
        }
    }
    wl
}

/// Contest score: `0.9·runtime + 0.1·critical-path wirelength`.
pub fn score(runtime_s: f64, critical_path_wl: f64) -> f64 {
    RUNTIME_WEIGHT * runtime_s + WIRELENGTH_WEIGHT * critical_path_wl
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingReport {
    pub legal: bool,
    pub overflow_nodes: usize,
    pub disconnected_connections: usize,
    pub total_wirelength: u64,
    pub critical_path_wirelength: u64,
    pub runtime_s: f64,
    pub score: f64,
    pub per_iteration: Vec<IterationStats>,
}

impl RoutingReport {
    pub fn build(
        graph: &RoutingGraph,
        netlist: &Netlist,
        solution: &Solution,
        runtime_s: f64,
        per_iteration: Vec<IterationStats>,
    ) -> Self {
        let v = validate(graph, netlist, solution);
        let wl = wirelength(graph, netlist, solution);
        Self {
            legal: v.is_legal(),
            overflow_nodes: v.overflow_nodes,
            disconnected_connections: v.disconnected_connections,
            total_wirelength: wl.total,
            critical_path_wirelength: wl.critical_path,
            runtime_s,
            score: score(runtime_s, wl.critical_path as f64),
            per_iteration,
        }
    }

    pub fn empty() -> Self {
        Self {
            legal: true,
            overflow_nodes: 0,
            disconnected_connections: 0,
            total_wirelength: 0,
            critical_path_wirelength: 0,
            runtime_s: 0.0,
            score: 0.0,
            per_iteration: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown report format `{other}` (json or csv)")),
        }
    }
}

#[derive(Serialize)]
struct CsvRow {
    legal: bool,
    overflow_nodes: usize,
    disconnected_connections: usize,
    total_wirelength: u64,
    critical_path_wirelength: u64,
    runtime_s: f64,
    score: f64,
    iterations: usize,
}

pub const CSV_COLUMNS: [&str; 8] = [
    "legal",
    "overflow_nodes",
    "disconnected_connections",
    "total_wirelength",
    "critical_path_wirelength",
    "runtime_s",
    "score",
    "iterations",
];

pub fn render_report(report: &RoutingReport, format: ReportFormat) -> Result<String, EvalError> {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report).map_err(|e| EvalError::Format(e.to_string())),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(CsvRow {
                legal: report.legal,
                overflow_nodes: report.overflow_nodes,
                disconnected_connections: report.disconnected_connections,
                total_wirelength: report.total_wirelength,
                critical_path_wirelength: report.critical_path_wirelength,
                runtime_s: report.runtime_s,
                score: report.score,
                iterations: report.per_iteration.len(),
            })
            .map_err(|e| EvalError::Format(e.to_string()))?;
            let bytes = w.into_inner().map_err(|e| EvalError::Format(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| EvalError::Format(e.to_string()))
        }
    }
}

pub fn emit_report(report: &RoutingReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<(), EvalError> {
    fs::write(path, render_report(report, format)?)?;
    Ok(())
}
