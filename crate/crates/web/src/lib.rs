//! WebAssembly bindings for the browser demo. Every export takes plain
//! numbers and returns a JSON string; routing runs single-threaded.

use parroute::netlist::generate_benchmark;
use parroute::rptt::{build_tree_shaped, PartitionItem};
use parroute::{BenchmarkSpec, GridSpec, Netlist, RouterConfig, RoutingGraph, RpttNode, TreeShape};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn design(width: i32, nets: usize, wires: &[(u8, u32)], pins: u32, locality: i32, seed: u64) -> Result<(RoutingGraph, Netlist), String> {
    let grid = GridSpec::new(width, width).with_wires(wires.iter().copied()).with_pins(pins).with_seed(seed);
    let graph = RoutingGraph::generate(&grid).map_err(|e| e.to_string())?;
    let netlist = generate_benchmark(&graph, &BenchmarkSpec::new(nets, locality, seed)).map_err(|e| e.to_string())?;
    Ok((graph, netlist))
}

/// Mixed lengths 1 and 2 with `tracks` length-1 tracks per direction.
fn demo_wires(tracks: u32) -> [(u8, u32); 2] {
    [(1, tracks), (2, tracks / 2 + 1)]
}

fn to_json(v: impl Serialize) -> String {
    serde_json::to_string(&v).unwrap_or_else(|e| json!({ "error": e.to_string() }).to_string())
}

fn error(e: impl ToString) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// Generates and routes a design. Paths come back as tile polylines:
/// one point per node, at the wire's exit tile.
#[wasm_bindgen]
pub fn route_design(width: i32, nets: usize, tracks: u32, seed: u64, hus: bool) -> String {
    let (graph, netlist) = match design(width, nets, &demo_wires(tracks), 6, 3, seed) {
        Ok(d) => d,
        Err(e) => return error(e),
    };
    let mut cfg = RouterConfig::default().with_threads(1);
    cfg.cost.hus = hus;
    cfg.max_iterations = 200;
    let result = match parroute::route_all(&graph, &netlist, cfg) {
        Ok(r) => r,
        Err(e) => return error(e),
    };
    let paths: Vec<Value> = netlist
        .connections()
        .iter()
        .zip(&result.paths)
        .map(|(c, p)| {
            let pts: Vec<[i32; 2]> = p.iter().map(|&n| graph.node(n).exit()).map(|t| [t.x, t.y]).collect();
            json!({ "net": c.net_id, "points": pts })
        })
        .collect();
    let solution = parroute::Solution::new(result.paths);
    let wl = parroute::wirelength(&graph, &netlist, &solution);
    to_json(json!({
        "width": graph.width(),
        "height": graph.height(),
        "nodes": graph.node_count(),
        "connections": netlist.connections().len(),
        "legal": result.success,
        "total_wirelength": wl.total,
        "critical_wirelength": wl.critical_path,
        "iterations": result.iterations,
        "paths": paths,
    }))
}

#[derive(Serialize)]
struct TreeView {
    id: u32,
    depth: usize,
    size: usize,
    cut: Option<(String, i32)>,
    /// Union of the boxes of every connection below this node.
    region: [i32; 4],
    children: Vec<(String, TreeView)>,
}

fn view(node: &RpttNode, depth: usize, netlist: &Netlist) -> TreeView {
    let mut ids = Vec::new();
    node.visit(&mut |n| {
        if n.is_leaf() {
            ids.extend(&n.connections)
        }
    });
    let region = ids.iter().map(|&i| netlist.connection(i).bbox).fold([i32::MAX, i32::MAX, i32::MIN, i32::MIN], |r, b| {
        [r[0].min(b.x_min), r[1].min(b.y_min), r[2].max(b.x_max), r[3].max(b.y_max)]
    });
    let children = [("mid", &node.mid), ("left", &node.left), ("right", &node.right)]
        .into_iter()
        .filter_map(|(k, c)| c.as_ref().map(|c| (k.to_string(), view(c, depth + 1, netlist))))
        .collect();
    TreeView { id: node.id, depth, size: ids.len(), cut: node.cut.map(|(a, v)| (format!("{a:?}"), v)), region, children }
}

/// Builds the partitioning tree for a generated design. `binary` picks the
/// two-way variant for comparison.
#[wasm_bindgen]
pub fn partition(width: i32, nets: usize, seed: u64, binary: bool) -> String {
    let (graph, netlist) = match design(width, nets, &demo_wires(4), 6, 3, seed) {
        Ok(d) => d,
        Err(e) => return error(e),
    };
    let items: Vec<PartitionItem> = netlist.connections().iter().map(|c| PartitionItem { id: c.index, bbox: c.bbox }).collect();
    let shape = if binary { TreeShape::Binary } else { TreeShape::Ternary };
    let tree = build_tree_shaped(&items, shape);
    to_json(json!({
        "width": graph.width(),
        "height": graph.height(),
        "depth": tree.depth(),
        "nodes": tree.node_count(),
        "leaves": tree.leaves().len(),
        "tree": view(&tree, 0, &netlist),
    }))
}

/// Routes a congested design (length-1 wires only, few tracks) twice, with and without the
/// hybrid schedule, and returns both per-iteration overuse curves.
#[wasm_bindgen]
pub fn hus_curves(seed: u64, nets: usize) -> String {
    let (graph, netlist) = match design(16, nets, &[(1, 3)], 4, 4, seed) {
        Ok(d) => d,
        Err(e) => return error(e),
    };
    let run = |hus: bool| {
        let mut cfg = RouterConfig::default().with_threads(1);
        cfg.cost.hus = hus;
        cfg.max_iterations = 150;
        parroute::route_all(&graph, &netlist, cfg).map(|r| json!({ "legal": r.success, "iterations": r.iterations }))
    };
    match (run(true), run(false)) {
        (Ok(on), Ok(off)) => to_json(json!({ "connections": netlist.connections().len(), "hus": on, "no_hus": off })),
        (Err(e), _) | (_, Err(e)) => error(e),
    }
}
