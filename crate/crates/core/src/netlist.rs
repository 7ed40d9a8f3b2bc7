//! Nets, their two-pin connections, bounding boxes, and the synthetic
//! benchmark generator.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rptt::Axis;
use crate::rrg::{NodeId, RoutingGraph, Tile};

pub const DEFAULT_MARGIN: i32 = 3;

#[derive(Debug, Error)]
pub enum NetlistError {
    #[error("invalid netlist: {0}")]
    Invalid(String),
    #[error("benchmark generation failed: {0}")]
    Generation(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Inclusive axis-aligned tile rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x_min: i32,
    pub y_min: i32,
    pub x_max: i32,
    pub y_max: i32,
}

impl BBox {
    pub fn new(x_min: i32, y_min: i32, x_max: i32, y_max: i32) -> Self {
        Self { x_min, y_min, x_max, y_max }
    }

    pub fn of_tile(t: Tile) -> Self {
        Self::new(t.x, t.y, t.x, t.y)
    }

    pub fn include(mut self, t: Tile) -> Self {
        self.x_min = self.x_min.min(t.x);
        self.y_min = self.y_min.min(t.y);
        self.x_max = self.x_max.max(t.x);
        self.y_max = self.y_max.max(t.y);
        self
    }

    /// Grows by `margin` on every side, clipped to `bounds`.
    pub fn expand(self, margin: i32, bounds: BBox) -> Self {
        Self {
            x_min: (self.x_min - margin).max(bounds.x_min),
            y_min: (self.y_min - margin).max(bounds.y_min),
            x_max: (self.x_max + margin).min(bounds.x_max),
            y_max: (self.y_max + margin).min(bounds.y_max),
        }
    }

    pub fn contains(&self, t: Tile) -> bool {
        (self.x_min..=self.x_max).contains(&t.x) && (self.y_min..=self.y_max).contains(&t.y)
    }

    pub fn area(&self) -> u64 {
        u64::from((self.x_max - self.x_min + 1) as u32) * u64::from((self.y_max - self.y_min + 1) as u32)
    }

    pub fn min_on(&self, axis: Axis) -> i32 {
        match axis {
            Axis::X => self.x_min,
            Axis::Y => self.y_min,
        }
    }

    pub fn max_on(&self, axis: Axis) -> i32 {
        match axis {
            Axis::X => self.x_max,
            Axis::Y => self.y_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub id: u32,
    pub source: NodeId,
    pub sinks: Vec<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Connection {
    /// Position in [`Netlist::connections`].
    pub index: u32,
    pub net_id: u32,
    /// Position of the sink within its net.
    pub sink_index: u32,
    pub source: NodeId,
    pub sink: NodeId,
    /// Net-wide box (all pins plus margin). Every connection of a net
    /// shares it, so partitioning never separates a net's connections.
    pub bbox: BBox,
    /// Endpoint box plus margin; the initial A* search region.
    pub search_bbox: BBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    nets: Vec<Net>,
    connections: Vec<Connection>,
    net_offsets: Vec<u32>,
    margin: i32,
}

/// Splits each net into one connection per sink.
pub fn decompose(graph: &RoutingGraph, nets: &[Net], margin: i32) -> Result<Vec<Connection>, NetlistError> {
    let bounds = graph.bounds();
    let mut out = Vec::with_capacity(nets.iter().map(|n| n.sinks.len()).sum());
    for net in nets {
        if net.sinks.is_empty() {
            return Err(NetlistError::Invalid(format!("net {} has no sinks", net.id)));
        }
        let src_tile = graph.node(net.source).anchor();
        let net_box =
            net.sinks.iter().fold(BBox::of_tile(src_tile), |b, &s| b.include(graph.node(s).anchor())).expand(margin, bounds);
        for (k, &sink) in net.sinks.iter().enumerate() {
            let search = BBox::of_tile(src_tile).include(graph.node(sink).anchor()).expand(margin, bounds);
            out.push(Connection {
                index: out.len() as u32,
                net_id: net.id,
                sink_index: k as u32,
                source: net.source,
                sink,
                bbox: net_box,
                search_bbox: search,
            });
        }
    }
    Ok(out)
}

impl Netlist {
    pub fn new(graph: &RoutingGraph, nets: Vec<Net>, margin: i32) -> Result<Self, NetlistError> {
        if margin < 0 {
            return Err(NetlistError::Invalid(format!("negative margin {margin}")));
        }
        for (i, net) in nets.iter().enumerate() {
            if net.id as usize != i {
                return Err(NetlistError::Invalid(format!("net at position {i} has id {}", net.id)));
            }
            for &pin in std::iter::once(&net.source).chain(&net.sinks) {
                if pin as usize >= graph.node_count() {
                    return Err(NetlistError::Invalid(format!("net {i} references unknown node {pin}")));
                }
                if !graph.node(pin).is_pin() {
                    return Err(NetlistError::Invalid(format!("net {i} uses non-pin node {pin}")));
                }
            }
        }
        let connections = decompose(graph, &nets, margin)?;
        let mut net_offsets = Vec::with_capacity(nets.len() + 1);
        let mut acc = 0u32;
        net_offsets.push(0);
        for net in &nets {
            acc += net.sinks.len() as u32;
            net_offsets.push(acc);
        }
        Ok(Self { nets, connections, net_offsets, margin })
    }

    pub fn empty() -> Self {
        Self { nets: Vec::new(), connections: Vec::new(), net_offsets: vec![0], margin: DEFAULT_MARGIN }
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    pub fn connection(&self, index: u32) -> &Connection {
        &self.connections[index as usize]
    }

    /// Global indices of the connections belonging to `net`.
    pub fn net_connections(&self, net: u32) -> std::ops::Range<u32> {
        self.net_offsets[net as usize]..self.net_offsets[net as usize + 1]
    }

    pub fn margin(&self) -> i32 {
        self.margin
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for net in &self.nets {
            write!(out, "NET {} {}", net.id, net.source).unwrap();
            for s in &net.sinks {
                write!(out, " {s}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_reader(reader: impl BufRead, graph: &RoutingGraph, margin: i32) -> Result<Self, NetlistError> {
        let mut nets = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let (no, line) = (i + 1, line?);
            let err = |message: String| NetlistError::Parse { line: no, message };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.is_empty() {
                continue;
            }
            if f[0] != "NET" {
                return Err(err(format!("unknown record `{}`", f[0])));
            }
            if f.len() < 4 {
                return Err(err("NET line needs an id, a source and at least one sink".into()));
            }
            let id: u32 = f[1].parse().map_err(|_| err(format!("bad net id `{}`", f[1])))?;
            if id as usize != nets.len() {
                return Err(err(format!("expected net id {}, found {id}", nets.len())));
            }
            let mut pins = Vec::with_capacity(f.len() - 2);
            for s in &f[2..] {
                let pin: u64 = s.parse().map_err(|_| err(format!("bad node id `{s}`")))?;
                if pin as usize >= graph.node_count() {
                    return Err(err(format!("unresolved node {pin}")));
                }
                if !graph.node(pin as NodeId).is_pin() {
                    return Err(err(format!("node {pin} is not a pin")));
                }
                pins.push(pin as NodeId);
            }
            nets.push(Net { id, source: pins[0], sinks: pins.split_off(1) });
        }
        Self::new(graph, nets, margin)
    }
}

pub fn save_netlist(netlist: &Netlist, path: impl AsRef<Path>) -> Result<(), NetlistError> {
    fs::write(path, netlist.to_text())?;
    Ok(())
}

pub fn load_netlist(path: impl AsRef<Path>, graph: &RoutingGraph, margin: i32) -> Result<Netlist, NetlistError> {
    let file = fs::File::open(path)?;
    Netlist::from_reader(BufReader::new(file), graph, margin)
}

/// Knobs of the synthetic benchmark generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub num_nets: usize,
    /// Mean of the geometric fanout distribution (≥ 1).
    pub fanout_mean: f64,
    pub max_fanout: u32,
    /// Chebyshev radius, in tiles, around the source where sinks land.
    pub locality: i32,
    /// Probability that a sink is drawn from the locality window.
    pub local_fraction: f64,
    pub margin: i32,
    pub seed: u64,
}

impl BenchmarkSpec {
    pub fn new(num_nets: usize, locality: i32, seed: u64) -> Self {
        Self { num_nets, fanout_mean: 4.0, max_fanout: 16, locality, local_fraction: 0.99, margin: DEFAULT_MARGIN, seed }
    }

    pub fn with_fanout(mut self, mean: f64) -> Self {
        self.fanout_mean = mean;
        self
    }

    pub fn with_margin(mut self, margin: i32) -> Self {
        self.margin = margin;
        self
    }
}

struct PinPool {
    free: Vec<Vec<NodeId>>,
    width: i32,
}

impl PinPool {
    fn new(graph: &RoutingGraph) -> Self {
        let mut free = Vec::with_capacity((graph.width() * graph.height()) as usize);
        for y in 0..graph.height() {
            for x in 0..graph.width() {
                let mut pins = graph.pins_at(Tile::new(x, y)).to_vec();
                pins.reverse();
                free.push(pins);
            }
        }
        Self { free, width: graph.width() }
    }

    fn has(&self, t: Tile) -> bool {
        !self.free[(t.y * self.width + t.x) as usize].is_empty()
    }

    fn take(&mut self, t: Tile) -> NodeId {
        self.free[(t.y * self.width + t.x) as usize].pop().expect("tile has a free pin")
    }

    /// A random free tile at the smallest Chebyshev distance from `center`,
    /// restricted to `region` and excluding `avoid`.
    fn nearest(&self, rng: &mut ChaCha8Rng, center: Tile, region: BBox, avoid: Option<Tile>) -> Option<Tile> {
        let reach = (region.x_max - region.x_min).max(region.y_max - region.y_min) + 1;
        for d in 0..=reach {
            let ring: Vec<Tile> = (center.y - d..=center.y + d)
                .flat_map(|y| (center.x - d..=center.x + d).map(move |x| Tile::new(x, y)))
                .filter(|t| (t.x - center.x).abs().max((t.y - center.y).abs()) == d)
                .filter(|&t| region.contains(t) && Some(t) != avoid && self.has(t))
                .collect();
            if !ring.is_empty() {
                return Some(ring[rng.random_range(0..ring.len())]);
            }
        }
        None
    }
}

fn random_tile(rng: &mut ChaCha8Rng, b: BBox) -> Tile {
    Tile::new(rng.random_range(b.x_min..=b.x_max), rng.random_range(b.y_min..=b.y_max))
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
fn generate_in_regions(graph: &RoutingGraph, spec: &BenchmarkSpec, regions: &[BBox]) -> Result<Netlist, NetlistError> {
    if !(spec.fanout_mean >= 1.0) {
        return Err(NetlistError::Generation(format!("fanout mean {} below 1", spec.fanout_mean)));
    }
    if spec.locality < 1 {
        return Err(NetlistError::Generation("locality must be at least one tile".into()));
    }
    let fanout = Geometric::new(1.0 / spec.fanout_mean).map_err(|e| NetlistError::Generation(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pool = PinPool::new(graph);
    let mut nets = Vec::with_capacity(spec.num_nets);
    const ATTEMPTS: usize = 32;

    for id in 0..spec.num_nets {
        let region = regions[id % regions.len()];
        let k = (1 + fanout.sample(&mut rng)).min(u64::from(spec.max_fanout.max(1))) as usize;

        let src_tile = (0..ATTEMPTS)
            .map(|_| random_tile(&mut rng, region))
            .find(|&t| pool.has(t))
            .or_else(|| {
                let c = random_tile(&mut rng, region);
                pool.nearest(&mut rng, c, region, None)
            })
            .ok_or_else(|| NetlistError::Generation(format!("no free pin left for the source of net {id}")))?;
        let source = pool.take(src_tile);

        let window = BBox::of_tile(src_tile).expand(spec.locality, region);
        let mut sinks = Vec::with_capacity(k);
        for _ in 0..k {
            let area = if rng.random_bool(spec.local_fraction.clamp(0.0, 1.0)) { window } else { region };
            let tile = (0..ATTEMPTS)
                .map(|_| random_tile(&mut rng, area))
                .find(|&t| t != src_tile && pool.has(t))
                .or_else(|| pool.nearest(&mut rng, src_tile, region, Some(src_tile)))
                .ok_or_else(|| NetlistError::Generation(format!("too few pins to place sinks of net {id}")))?;
            sinks.push(pool.take(tile));
        }
        nets.push(Net { id: id as u32, source, sinks });
    }
    Netlist::new(graph, nets, spec.margin)
}

/// Random nets with sources spread over the whole device and sinks drawn
/// near their source.
pub fn generate_benchmark(graph: &RoutingGraph, spec: &BenchmarkSpec) -> Result<Netlist, NetlistError> {
    generate_in_regions(graph, spec, &[graph.bounds()])
}

/// Nets confined to the four quadrants of the device, assigned round-robin.
/// Margin-expanded boxes may still straddle the quadrant borders.
pub fn generate_quadrant_benchmark(graph: &RoutingGraph, spec: &BenchmarkSpec) -> Result<Netlist, NetlistError> {
    let (w, h) = (graph.width(), graph.height());
    if w < 2 || h < 2 {
        return Err(NetlistError::Generation("quadrants need at least a 2x2 grid".into()));
    }
    let (mx, my) = (w / 2, h / 2);
    let quads = [
        BBox::new(0, 0, mx - 1, my - 1),
        BBox::new(mx, 0, w - 1, my - 1),
        BBox::new(0, my, mx - 1, h - 1),
        BBox::new(mx, my, w - 1, h - 1),
    ];
    generate_in_regions(graph, spec, &quads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rrg::{generate_grid, GridSpec};

    fn grid(w: i32, h: i32) -> RoutingGraph {
        generate_grid(w, h, [(1, 2)], 1.0, 0).unwrap()
    }

    #[test]
    fn one_sink_gives_one_expanded_box() {
        let g = grid(10, 10);
        let src = g.pins_at(Tile::new(4, 4))[0];
        let sink = g.pins_at(Tile::new(5, 6))[0];
        let nl = Netlist::new(&g, vec![Net { id: 0, source: src, sinks: vec![sink] }], 3).unwrap();
        assert_eq!(nl.connections().len(), 1);
        let c = nl.connections()[0];
        assert_eq!(c.bbox, BBox::new(1, 1, 8, 9));
        assert_eq!(c.search_bbox, c.bbox);
    }

    #[test]
    fn fanout_shares_source_and_box() {
        let g = grid(10, 10);
        let src = g.pins_at(Tile::new(0, 0))[0];
        let sinks: Vec<_> = (1..6).map(|x| g.pins_at(Tile::new(x, 1))[0]).collect();
        let nl = Netlist::new(&g, vec![Net { id: 0, source: src, sinks }], 1).unwrap();
        assert_eq!(nl.connections().len(), 5);
        assert!(nl.connections().iter().all(|c| c.source == src && c.bbox == nl.connections()[0].bbox));
        assert_eq!(nl.net_connections(0), 0..5);
        for c in nl.connections() {
            assert!(c.bbox.contains(g.node(c.source).anchor()) && c.bbox.contains(g.node(c.sink).anchor()));
        }
    }

    #[test]
    fn net_without_sinks_is_rejected() {
        let g = grid(2, 2);
        let net = Net { id: 0, source: g.pins_at(Tile::new(0, 0))[0], sinks: vec![] };
        assert!(matches!(decompose(&g, &[net], 3), Err(NetlistError::Invalid(_))));
    }

    #[test]
    fn zero_nets_gives_empty_netlist() {
        let g = grid(4, 4);
        let nl = generate_benchmark(&g, &BenchmarkSpec::new(0, 2, 1)).unwrap();
        assert!(nl.nets().is_empty() && nl.connections().is_empty());
    }

    #[test]
    fn generator_is_deterministic() {
        let g = grid(12, 12);
        let spec = BenchmarkSpec::new(60, 2, 42);
        assert_eq!(generate_benchmark(&g, &spec).unwrap(), generate_benchmark(&g, &spec).unwrap());
        let other = BenchmarkSpec::new(60, 2, 43);
        assert_ne!(generate_benchmark(&g, &spec).unwrap(), generate_benchmark(&g, &other).unwrap());
    }

    #[test]
    fn generator_never_reuses_a_pin() {
        let g = RoutingGraph::generate(&GridSpec::new(8, 8).with_pins(4)).unwrap();
        let nl = generate_benchmark(&g, &BenchmarkSpec::new(40, 2, 3)).unwrap();
        let mut pins: Vec<_> = nl.nets().iter().flat_map(|n| std::iter::once(n.source).chain(n.sinks.iter().copied())).collect();
        let before = pins.len();
        pins.sort_unstable();
        pins.dedup();
        assert_eq!(before, pins.len());
    }

    #[test]
    fn too_few_pins_is_a_generation_error() {
        let g = RoutingGraph::generate(&GridSpec::new(2, 2).with_pins(1)).unwrap();
        let err = generate_benchmark(&g, &BenchmarkSpec::new(10, 1, 0)).unwrap_err();
        assert!(matches!(err, NetlistError::Generation(_)));
    }

    #[test]
    fn quadrant_nets_stay_in_their_quadrant() {
        let g = grid(16, 16);
        let nl = generate_quadrant_benchmark(&g, &BenchmarkSpec::new(80, 2, 9)).unwrap();
        for net in nl.nets() {
            let q = |p: NodeId| {
                let t = g.node(p).anchor();
                (t.x >= 8, t.y >= 8)
            };
            assert!(net.sinks.iter().all(|&s| q(s) == q(net.source)));
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let g = grid(6, 6);
        let nl = generate_benchmark(&g, &BenchmarkSpec::new(20, 2, 5)).unwrap();
        let back = Netlist::from_reader(nl.to_text().as_bytes(), &g, nl.margin()).unwrap();
        assert_eq!(nl, back);

        let empty = Netlist::from_reader("".as_bytes(), &g, 3).unwrap();
        assert!(empty.nets().is_empty());

        let wire = g.nodes().iter().find(|n| !n.is_pin()).unwrap().id;
        for (text, needle) in [
            ("NET 0 0 999999\n", "unresolved node"),
            (&format!("NET 0 0 {wire}\n")[..], "not a pin"),
            ("NET 1 0 1\n", "expected net id 0"),
            ("NET 0 0\n", "at least one sink"),
            ("PIN 0 0 1\n", "unknown record"),
        ] {
            match Netlist::from_reader(text.as_bytes(), &g, 3) {
                Err(NetlistError::Parse { line: 1, message }) => assert!(message.contains(needle), "{message}"),
                other => panic!("{text:?}: unexpected {other:?}"),
            }
        }
    }
}
