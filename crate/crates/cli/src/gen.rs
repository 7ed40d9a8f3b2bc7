use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use parroute::netlist::{generate_benchmark, generate_quadrant_benchmark, DEFAULT_MARGIN};
use parroute::{BenchmarkSpec, GridSpec, Netlist, RoutingGraph};

use crate::args::{GenParams, Preset};

struct Defaults {
    width: i32,
    wires: &'static str,
    pins: u32,
    nets: usize,
    locality: i32,
    quadrant: bool,
    seed: u64,
}

fn preset(p: Option<Preset>) -> Defaults {
    let small = Defaults { width: 20, wires: "1:4,2:2,4:2", pins: 12, nets: 500, locality: 2, quadrant: false, seed: 11 };
    match p {
        None | Some(Preset::Small) => small,
        Some(Preset::Tiny) => Defaults { width: 8, nets: 50, seed: 1, ..small },
        Some(Preset::Large) => Defaults { width: 48, pins: 8, nets: 2600, locality: 3, seed: 9, ..small },
        Some(Preset::Congested) => Defaults { width: 16, wires: "1:3", pins: 4, nets: 180, locality: 4, seed: 4, ..small },
        Some(Preset::Quadrant) => Defaults { width: 32, pins: 8, nets: 1200, locality: 3, quadrant: true, seed: 4, ..small },
    }
}

pub fn parse_wires(text: &str) -> Result<BTreeMap<u8, u32>> {
    text.split(',')
        .map(|pair| {
            let (len, count) = pair.trim().split_once(':').with_context(|| format!("wire class `{pair}` is not LEN:TRACKS"))?;
            Ok((
                len.trim().parse().with_context(|| format!("bad wire length `{len}`"))?,
                count.trim().parse().with_context(|| format!("bad track count `{count}`"))?,
            ))
        })
        .collect()
}

/// Builds the graph and netlist described by `p`. Returns a short name.
pub fn generate(p: &GenParams) -> Result<(String, RoutingGraph, Netlist)> {
    let d = preset(p.preset);
    let width = p.width.unwrap_or(d.width);
    let height = p.height.unwrap_or(width);
    let seed = p.seed.unwrap_or(d.seed);
    let mut grid = GridSpec::new(width, height)
        .with_wires(parse_wires(p.wires.as_deref().unwrap_or(d.wires))?)
        .with_pins(p.pins.unwrap_or(d.pins))
        .with_seed(seed);
    if let Some(density) = p.switch_density {
        grid = grid.with_switch_density(density);
    }
    let graph = RoutingGraph::generate(&grid)?;
    let nets = p.nets.unwrap_or(d.nets);
    let mut spec = BenchmarkSpec::new(nets, p.locality.unwrap_or(d.locality), seed).with_margin(DEFAULT_MARGIN);
    if let Some(f) = p.fanout {
        if f.is_nan() || f < 1.0 {
            bail!("fanout mean must be at least 1, got {f}");
        }
        spec = spec.with_fanout(f);
    }
    let quadrant = p.quadrant || d.quadrant;
    let netlist = if quadrant { generate_quadrant_benchmark(&graph, &spec)? } else { generate_benchmark(&graph, &spec)? };
    let name = format!("{}{width}x{height}-n{nets}-s{seed}", if quadrant { "quad-" } else { "" });
    Ok((name, graph, netlist))
}
