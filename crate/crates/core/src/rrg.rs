//! Routing resource graph: wires are nodes, PIPs are directed edges.
//!
//! Topology is immutable once built. Per-node congestion state (occupancy
//! and historical cost) lives in [`crate::router::CongestionMap`] so that a
//! graph can be shared read-only between routing threads and runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::BBox;

pub type NodeId = u32;

/// Wire lengths, in INT tiles, that the fabric provides.
pub const WIRE_LENGTHS: [u8; 4] = [1, 2, 4, 12];

/// Every routing node holds at most one net.
pub const NODE_CAPACITY: u32 = 1;

#[derive(Debug, Error)]
pub enum RrgError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tile {
    pub x: i32,
    pub y: i32,
}

impl Tile {
    pub fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Tile) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrgNode {
    pub id: NodeId,
    /// Anchor tile: where the wire is driven.
    pub tile_x: i32,
    pub tile_y: i32,
    /// INT tiles spanned; 0 marks an intra-tile pin.
    pub length: u8,
    pub base_cost: f64,
    /// Tile where the wire drives its successors. Derived from the edges:
    /// the anchor of the first successor, or the anchor itself for pins and
    /// dead-end wires.
    pub exit_x: i32,
    pub exit_y: i32,
}

impl RrgNode {
    pub fn is_pin(&self) -> bool {
        self.length == 0
    }

    pub fn capacity(&self) -> u32 {
        NODE_CAPACITY
    }

    pub fn anchor(&self) -> Tile {
        Tile::new(self.tile_x, self.tile_y)
    }

    pub fn exit(&self) -> Tile {
        Tile::new(self.exit_x, self.exit_y)
    }
}

/// Base cost as a function of wire length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseCost {
    pub pin: f64,
    pub unit: f64,
    pub per_extra_tile: f64,
}

impl Default for BaseCost {
    fn default() -> Self {
        Self { pin: 0.5, unit: 1.0, per_extra_tile: 0.25 }
    }
}

impl BaseCost {
    pub fn of_length(&self, length: u8) -> f64 {
        if length == 0 {
            self.pin
        } else {
            self.unit + self.per_extra_tile * f64::from(length - 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    East,
    North,
    West,
    South,
}

impl Dir {
    const ALL: [Dir; 4] = [Dir::East, Dir::North, Dir::West, Dir::South];

    fn step(self) -> (i32, i32) {
        match self {
            Dir::East => (1, 0),
            Dir::North => (0, 1),
            Dir::West => (-1, 0),
            Dir::South => (0, -1),
        }
    }
}

/// Parameters of the island-style grid generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub width: i32,
    pub height: i32,
    /// Wire length → tracks per direction per tile.
    pub wires: BTreeMap<u8, u32>,
    /// Fraction of candidate wire→wire PIPs that are kept.
    pub switch_density: f64,
    pub pins_per_tile: u32,
    pub seed: u64,
    pub base_cost: BaseCost,
}

impl GridSpec {
    pub fn new(width: i32, height: i32) -> Self {
        Self {
            width,
            height,
            wires: BTreeMap::from([(1, 4), (2, 2), (4, 2)]),
            switch_density: 1.0,
            pins_per_tile: 8,
            seed: 0,
            base_cost: BaseCost::default(),
        }
    }

    pub fn with_wires(mut self, wires: impl IntoIterator<Item = (u8, u32)>) -> Self {
        self.wires = wires.into_iter().collect();
        self
    }

    pub fn with_switch_density(mut self, density: f64) -> Self {
        self.switch_density = density;
        self
    }

    pub fn with_pins(mut self, pins_per_tile: u32) -> Self {
        self.pins_per_tile = pins_per_tile;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Nodes emitted for every tile: pins followed by four directions of
    /// each wire class.
    pub fn nodes_per_tile(&self) -> u32 {
        self.pins_per_tile + 4 * self.wires.values().sum::<u32>()
    }

    fn check(&self) -> Result<(), RrgError> {
        if self.width < 1 || self.height < 1 {
            return Err(RrgError::InvalidParameter(format!("grid must be at least 1x1, got {}x{}", self.width, self.height)));
        }
        if let Some(len) = self.wires.keys().find(|l| !WIRE_LENGTHS.contains(l)) {
            return Err(RrgError::InvalidParameter(format!("wire length {len} is not one of {WIRE_LENGTHS:?}")));
        }
        if self.wires.values().all(|&c| c == 0) {
            return Err(RrgError::InvalidParameter("at least one wire class needs a nonzero track count".into()));
        }
        if !(self.switch_density > 0.0 && self.switch_density <= 1.0) {
            return Err(RrgError::InvalidParameter(format!("switch density {} outside (0, 1]", self.switch_density)));
        }
        Ok(())
    }
}

/// Shorthand for the common generator call with default pins and base costs.
pub fn generate_grid(
    width: i32,
    height: i32,
    wires: impl IntoIterator<Item = (u8, u32)>,
    switch_density: f64,
    seed: u64,
) -> Result<RoutingGraph, RrgError> {
    RoutingGraph::generate(&GridSpec::new(width, height).with_wires(wires).with_switch_density(switch_density).with_seed(seed))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn keep_switch(seed: u64, src: NodeId, dst: NodeId, density: f64) -> bool {
    if density >= 1.0 {
        return true;
    }
    let h = splitmix64(seed ^ splitmix64((u64::from(src) << 32) | u64::from(dst)));
    ((h >> 11) as f64 / (1u64 << 53) as f64) < density
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutingGraph {
    width: i32,
    height: i32,
    nodes: Vec<RrgNode>,
    edge_offsets: Vec<u32>,
    edge_targets: Vec<NodeId>,
    tile_pins: Vec<Vec<NodeId>>,
    min_unit_cost: f64,
}

impl RoutingGraph {
    /// Builds a graph from raw nodes and edges, validating every invariant.
    /// Node ids must be dense and in order; edges keep their relative order
    /// per source node.
    pub fn from_parts(width: i32, height: i32, nodes: Vec<RrgNode>, edges: &[(NodeId, NodeId)]) -> Result<Self, RrgError> {
        if width < 1 || height < 1 {
            return Err(RrgError::InvalidParameter(format!("grid must be at least 1x1, got {width}x{height}")));
        }
        let invalid = |m: String| Err(RrgError::InvalidParameter(m));
        for (i, n) in nodes.iter().enumerate() {
            if n.id as usize != i {
                return invalid(format!("node at index {i} has id {}", n.id));
            }
            if n.length != 0 && !WIRE_LENGTHS.contains(&n.length) {
                return invalid(format!("node {i} has length {}", n.length));
            }
            if !(0..width).contains(&n.tile_x) || !(0..height).contains(&n.tile_y) {
                return invalid(format!("node {i} anchored outside the grid"));
            }
            if !(n.base_cost.is_finite() && n.base_cost >= 0.0) {
                return invalid(format!("node {i} has base cost {}", n.base_cost));
            }
        }
        let count = nodes.len() as u32;
        let mut degree = vec![0u32; nodes.len() + 1];
        for &(s, d) in edges {
            if s >= count || d >= count {
                return invalid(format!("edge {s}->{d} references an unknown node"));
            }
            if s == d {
                return invalid(format!("self-loop on node {s}"));
            }
            degree[s as usize + 1] += 1;
        }
        for i in 1..degree.len() {
            degree[i] += degree[i - 1];
        }
        let edge_offsets = degree.clone();
        let mut cursor = degree;
        let mut edge_targets = vec![0; edges.len()];
        for &(s, d) in edges {
            let slot = &mut cursor[s as usize];
            edge_targets[*slot as usize] = d;
            *slot += 1;
        }

        let mut graph = Self {
            width,
            height,
            nodes,
            edge_offsets,
            edge_targets,
            tile_pins: vec![Vec::new(); (width * height) as usize],
            min_unit_cost: f64::INFINITY,
        };
        graph.derive();
        Ok(graph)
    }

    fn derive(&mut self) {
        for i in 0..self.nodes.len() {
            let node = self.nodes[i];
            let exit = if node.is_pin() {
                node.anchor()
            } else {
                self.successors(node.id).first().map(|&s| self.nodes[s as usize].anchor()).unwrap_or(node.anchor())
            };
            let n = &mut self.nodes[i];
            n.exit_x = exit.x;
            n.exit_y = exit.y;
            if node.is_pin() {
                let idx = self.tile_index(node.anchor());
                self.tile_pins[idx].push(node.id);
            } else {
                self.min_unit_cost = self.min_unit_cost.min(node.base_cost / f64::from(node.length));
            }
        }
        if !self.min_unit_cost.is_finite() {
            self.min_unit_cost = 0.0;
        }
    }

    pub fn generate(spec: &GridSpec) -> Result<Self, RrgError> {
        spec.check()?;
        let per_tile = spec.nodes_per_tile();
        let tiles = (spec.width * spec.height) as u32;
        let total = u64::from(per_tile) * u64::from(tiles);
        if total > u64::from(u32::MAX) {
            return Err(RrgError::InvalidParameter("grid too large".into()));
        }

        // (length, direction) for each wire slot within a tile.
        let mut slots: Vec<(u8, Dir)> = Vec::new();
        for (&len, &count) in &spec.wires {
            for dir in Dir::ALL {
                slots.extend(std::iter::repeat_n((len, dir), count as usize));
            }
        }
        let pins = spec.pins_per_tile;
        let first_id = |x: i32, y: i32| (y * spec.width + x) as u32 * per_tile;

        let mut nodes = Vec::with_capacity(total as usize);
        for y in 0..spec.height {
            for x in 0..spec.width {
                for _ in 0..pins {
                    nodes.push(RrgNode {
                        id: nodes.len() as NodeId,
                        tile_x: x,
                        tile_y: y,
                        length: 0,
                        base_cost: spec.base_cost.of_length(0),
                        exit_x: x,
                        exit_y: y,
                    });
                }
                for &(len, _) in &slots {
                    nodes.push(RrgNode {
                        id: nodes.len() as NodeId,
                        tile_x: x,
                        tile_y: y,
                        length: len,
                        base_cost: spec.base_cost.of_length(len),
                        exit_x: x,
                        exit_y: y,
                    });
                }
            }
        }

        let inside = |x: i32, y: i32| (0..spec.width).contains(&x) && (0..spec.height).contains(&y);
        let mut edges = Vec::new();
        for y in 0..spec.height {
            for x in 0..spec.width {
                let base = first_id(x, y);
                let wires = (base + pins)..(base + per_tile);
                for pin in base..base + pins {
                    edges.extend(wires.clone().map(|w| (pin, w)));
                }
                for (slot, &(len, dir)) in slots.iter().enumerate() {
                    let src = base + pins + slot as u32;
                    let (dx, dy) = dir.step();
                    let (ex, ey) = (x + dx * i32::from(len), y + dy * i32::from(len));
                    if !inside(ex, ey) {
                        continue;
                    }
                    let far = first_id(ex, ey);
                    edges.extend((far..far + pins).map(|p| (src, p)));
                    edges.extend(
                        ((far + pins)..(far + per_tile))
                            .filter(|&dst| keep_switch(spec.seed, src, dst, spec.switch_density))
                            .map(|dst| (src, dst)),
                    );
                }
            }
        }
        Self::from_parts(spec.width, spec.height, nodes, &edges)
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_targets.len()
    }

    pub fn nodes(&self) -> &[RrgNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &RrgNode {
        &self.nodes[id as usize]
    }

    pub fn successors(&self, id: NodeId) -> &[NodeId] {
        let lo = self.edge_offsets[id as usize] as usize;
        let hi = self.edge_offsets[id as usize + 1] as usize;
        &self.edge_targets[lo..hi]
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.successors(from).contains(&to)
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.nodes.len() as NodeId).flat_map(move |s| self.successors(s).iter().map(move |&d| (s, d)))
    }

    pub fn tile_index(&self, tile: Tile) -> usize {
        (tile.y * self.width + tile.x) as usize
    }

    pub fn pins_at(&self, tile: Tile) -> &[NodeId] {
        &self.tile_pins[self.tile_index(tile)]
    }

    /// Cheapest base cost per tile spanned over all wires.
    pub fn min_unit_cost(&self) -> f64 {
        self.min_unit_cost
    }

    pub fn bounds(&self) -> BBox {
        BBox::new(0, 0, self.width - 1, self.height - 1)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(32 * (self.nodes.len() + self.edge_targets.len()));
        writeln!(out, "RRG v1 {} {} {} {}", self.width, self.height, self.nodes.len(), self.edge_targets.len()).unwrap();
        for n in &self.nodes {
            writeln!(out, "N {} {} {} {} {}", n.id, n.tile_x, n.tile_y, n.length, n.base_cost).unwrap();
        }
        for (s, d) in self.edges() {
            writeln!(out, "E {s} {d}").unwrap();
        }
        out
    }

    pub fn from_reader(reader: impl BufRead) -> Result<Self, RrgError> {
        let parse_err = |line: usize, message: String| RrgError::Parse { line, message };
        let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

        let (width, height, node_count, edge_count) = loop {
            let Some((no, line)) = lines.next() else {
                return Err(parse_err(1, "missing RRG header".into()));
            };
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 || f[0] != "RRG" || f[1] != "v1" {
                return Err(parse_err(no, format!("malformed header `{line}`")));
            }
            let num = |s: &str| s.parse::<i64>().map_err(|_| parse_err(no, format!("bad header field `{s}`")));
            let (w, h, n, e) = (num(f[2])?, num(f[3])?, num(f[4])?, num(f[5])?);
            if w < 1 || h < 1 || n < 0 || e < 0 || w * h > i64::from(i32::MAX) || n > i64::from(u32::MAX) {
                return Err(parse_err(no, format!("malformed header `{line}`")));
            }
            break (w as i32, h as i32, n as usize, e as usize);
        };

        let mut nodes: Vec<Option<RrgNode>> = vec![None; node_count];
        let mut edges = Vec::with_capacity(edge_count);
        let mut last = 1;
        for (no, line) in lines {
            let line = line?;
            last = no;
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.first() {
                None => continue,
                Some(&"N") => {
                    if f.len() != 6 {
                        return Err(parse_err(no, "node line needs 5 fields".into()));
                    }
                    let int = |s: &str| s.parse::<i64>().map_err(|_| parse_err(no, format!("bad integer `{s}`")));
                    let id = int(f[1])?;
                    let (x, y, len) = (int(f[2])?, int(f[3])?, int(f[4])?);
                    let cost: f64 = f[5].parse().map_err(|_| parse_err(no, format!("bad base cost `{}`", f[5])))?;
                    if id < 0 || id as usize >= node_count {
                        return Err(parse_err(no, format!("node id {id} out of range")));
                    }
                    if !(0..i64::from(width)).contains(&x) || !(0..i64::from(height)).contains(&y) {
                        return Err(parse_err(no, format!("node {id} anchored outside the grid")));
                    }
                    if len != 0 && !WIRE_LENGTHS.iter().any(|&l| i64::from(l) == len) {
                        return Err(parse_err(no, format!("node {id} has invalid length {len}")));
                    }
                    if !(cost.is_finite() && cost >= 0.0) {
                        return Err(parse_err(no, format!("node {id} has invalid base cost")));
                    }
                    let slot = &mut nodes[id as usize];
                    if slot.is_some() {
                        return Err(parse_err(no, format!("duplicate node id {id}")));
                    }
                    *slot = Some(RrgNode {
                        id: id as NodeId,
                        tile_x: x as i32,
                        tile_y: y as i32,
                        length: len as u8,
                        base_cost: cost,
                        exit_x: x as i32,
                        exit_y: y as i32,
                    });
                }
                Some(&"E") => {
                    if f.len() != 3 {
                        return Err(parse_err(no, "edge line needs 2 fields".into()));
                    }
                    let mut ends = [0 as NodeId; 2];
                    for (slot, s) in ends.iter_mut().zip(&f[1..]) {
                        let id: u64 = s.parse().map_err(|_| parse_err(no, format!("bad node id `{s}`")))?;
                        if id as usize >= node_count {
                            return Err(parse_err(no, format!("unknown node {id}")));
                        }
                        *slot = id as NodeId;
                    }
                    if ends[0] == ends[1] {
                        return Err(parse_err(no, format!("self-loop on node {}", ends[0])));
                    }
                    edges.push((ends[0], ends[1]));
                }
                Some(tag) => return Err(parse_err(no, format!("unknown record `{tag}`"))),
            }
        }
        if edges.len() != edge_count {
            return Err(parse_err(last, format!("header declares {edge_count} edges, found {}", edges.len())));
        }
        let nodes = nodes
            .into_iter()
            .enumerate()
            .map(|(i, n)| n.ok_or_else(|| parse_err(last, format!("missing node id {i}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_parts(width, height, nodes, &edges).map_err(|e| parse_err(last, e.to_string()))
    }
}

pub fn save_rrg(graph: &RoutingGraph, path: impl AsRef<Path>) -> Result<(), RrgError> {
    fs::write(path, graph.to_text())?;
    Ok(())
}

pub fn load_rrg(path: impl AsRef<Path>) -> Result<RoutingGraph, RrgError> {
    let file = fs::File::open(path)?;
    RoutingGraph::from_reader(BufReader::new(file))
}
