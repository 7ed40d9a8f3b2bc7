//! Benchmark sweeps: thread counts × schedulers, optionally with HUS off.

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use parroute::netlist::load_netlist;
use parroute::rrg::load_rrg;
use parroute::{route_all, wirelength, Netlist, RouterConfig, RoutingGraph, Solution, TreeShape};

use crate::args::{BenchArgs, Scheduler};
use crate::config::{self, FileConfig};
use crate::gen;

struct Measured {
    runtime_s: f64,
    iterations: usize,
    total_wl: u64,
    critical_wl: u64,
    legal: bool,
}

/// Runs `repeat` times and keeps the run with the median runtime.
fn measure(graph: &RoutingGraph, netlist: &Netlist, cfg: &RouterConfig, repeat: usize) -> Result<Measured> {
    let mut runs = Vec::with_capacity(repeat);
    for _ in 0..repeat.max(1) {
        let t = Instant::now();
        let r = route_all(graph, netlist, cfg.clone())?;
        let runtime_s = t.elapsed().as_secs_f64();
        let wl = wirelength(graph, netlist, &Solution::new(r.paths));
        runs.push(Measured {
            runtime_s,
            iterations: r.iterations.len(),
            total_wl: wl.total,
            critical_wl: wl.critical_path,
            legal: r.success,
        });
    }
    runs.sort_by(|a, b| a.runtime_s.total_cmp(&b.runtime_s));
    Ok(runs.swap_remove(runs.len() / 2))
}

pub fn run(a: &BenchArgs, file: &FileConfig) -> Result<ExitCode> {
    let base = config::resolve(&a.router, None, None, file)?;
    let (name, graph, netlist) = match (&a.rrg, &a.netlist) {
        (Some(r), Some(n)) => {
            let graph = load_rrg(r)?;
            let netlist = load_netlist(n, &graph, base.margin)?;
            (r.file_stem().map_or("input".into(), |s| s.to_string_lossy().into_owned()), graph, netlist)
        }
        _ => gen::generate(&a.gen)?,
    };

    let mut header = vec![
        "benchmark",
        "connections",
        "scheduler",
        "threads",
        "runs",
        "runtime_s",
        "speedup",
        "iterations",
        "total_wirelength",
        "critical_wirelength",
        "score",
        "legal",
    ];
    if a.hus_ablation {
        header.extend(["runtime_s_no_hus", "iterations_no_hus", "runtime_ratio", "iteration_ratio"]);
    }
    let out: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(&header)?;

    let mut all_legal = true;
    for &scheduler in &a.schedulers {
        let mut reference = None;
        for &threads in &a.threads {
            let mut cfg = base.router.clone().with_threads(threads);
            cfg.tree_shape = match scheduler {
                Scheduler::Rptt => TreeShape::Ternary,
                Scheduler::Binary => TreeShape::Binary,
            };
            cfg.validate()?;
            let m = measure(&graph, &netlist, &cfg, a.repeat)?;
            let reference = *reference.get_or_insert(m.runtime_s);
            all_legal &= m.legal;
            let mut row = vec![
                name.clone(),
                netlist.connections().len().to_string(),
                format!("{scheduler:?}").to_lowercase(),
                threads.to_string(),
                a.repeat.max(1).to_string(),
                format!("{:.6}", m.runtime_s),
                format!("{:.3}", reference / m.runtime_s),
                m.iterations.to_string(),
                m.total_wl.to_string(),
                m.critical_wl.to_string(),
                format!("{:.4}", parroute::score(m.runtime_s, m.critical_wl as f64)),
                m.legal.to_string(),
            ];
            if a.hus_ablation {
                let mut off = cfg.clone();
                off.cost.hus = false;
                let n = measure(&graph, &netlist, &off, a.repeat)?;
                row.extend([
                    format!("{:.6}", n.runtime_s),
                    n.iterations.to_string(),
                    format!("{:.3}", m.runtime_s / n.runtime_s),
                    format!("{:.3}", m.iterations as f64 / n.iterations as f64),
                ]);
            }
            csv.write_record(&row)?;
            csv.flush()?;
        }
    }
    Ok(if all_legal { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
