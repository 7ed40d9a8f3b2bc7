mod args;
mod bench;
mod config;
mod gen;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use parroute::eval::{load_solution, render_report, save_solution, ReportFormat, Violation};
use parroute::netlist::{load_netlist, save_netlist, DEFAULT_MARGIN};
use parroute::rrg::{load_rrg, save_rrg};
use parroute::{score, validate, wirelength, RouteError, Router, RoutingReport, Solution};

use args::{Cli, Command, Format, GenerateArgs, RouteArgs, ScoreArgs, ValidateArgs};
use config::FileConfig;

const ILLEGAL: u8 = 1;
const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = FileConfig::load(cli.config.as_deref()).and_then(|file| match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Route(a) => route(a, &file),
        Command::Validate(a) => validate_cmd(a),
        Command::Score(a) => score_cmd(a),
        Command::Bench(a) => bench::run(a, &file),
    });
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(USAGE)
    })
}

fn generate(a: &GenerateArgs) -> Result<ExitCode> {
    let (name, graph, netlist) = gen::generate(&a.gen)?;
    save_rrg(&graph, &a.rrg)?;
    save_netlist(&netlist, &a.netlist)?;
    eprintln!(
        "{name}: {} nodes, {} edges, {} nets, {} connections",
        graph.node_count(),
        graph.edge_count(),
        netlist.nets().len(),
        netlist.connections().len()
    );
    Ok(ExitCode::SUCCESS)
}

fn route(a: &RouteArgs, file: &FileConfig) -> Result<ExitCode> {
    let resolved = config::resolve(&a.router, a.threads, a.scheduler, file)?;
    let graph = load_rrg(&a.rrg).with_context(|| format!("loading {}", a.rrg.display()))?;
    let netlist =
        load_netlist(&a.netlist, &graph, resolved.margin).with_context(|| format!("loading {}", a.netlist.display()))?;
    let mut cfg = resolved.router;
    cfg.trace = a.dump_tree.is_some();

    let result = match Router::new(&graph, &netlist, cfg)?.route_all() {
        Ok(r) => r,
        Err(e @ RouteError::Unroutable { .. }) => {
            eprintln!("routing failed: {e}");
            return Ok(ExitCode::from(ILLEGAL));
        }
        Err(e) => return Err(e.into()),
    };

    if let Some(path) = &a.stats_jsonl {
        let mut w = BufWriter::new(File::create(path)?);
        for s in &result.iterations {
            writeln!(w, "{}", serde_json::to_string(s)?)?;
        }
        w.flush()?;
    }
    if let Some(path) = &a.dump_tree {
        let mut w = BufWriter::new(File::create(path)?);
        for (i, (tree, _)) in result.trace.iter().enumerate() {
            writeln!(w, "iteration {}", i + 1)?;
            w.write_all(tree.dump().as_bytes())?;
        }
        w.flush()?;
    }

    let solution = Solution::new(result.paths);
    if let Some(path) = &a.solution {
        save_solution(&solution, &netlist, path)?;
    }
    let report = RoutingReport::build(&graph, &netlist, &solution, result.runtime.as_secs_f64(), result.iterations);
    let format = match a.format.or(file.format).unwrap_or(Format::Json) {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    let text = render_report(&report, format)?;
    match &a.report {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "{}: {} iterations, {:.3}s, critical wirelength {}, score {:.2}",
        if report.legal { "legal" } else { "illegal" },
        report.per_iteration.len(),
        report.runtime_s,
        report.critical_path_wirelength,
        report.score
    );
    Ok(if report.legal { ExitCode::SUCCESS } else { ExitCode::from(ILLEGAL) })
}

fn validate_cmd(a: &ValidateArgs) -> Result<ExitCode> {
    let graph = load_rrg(&a.rrg)?;
    let netlist = load_netlist(&a.netlist, &graph, DEFAULT_MARGIN)?;
    let solution = load_solution(&a.solution, &graph, &netlist)?;
    let v = validate(&graph, &netlist, &solution);
    for violation in &v.violations {
        println!("{}", describe(violation));
    }
    let wl = wirelength(&graph, &netlist, &solution);
    println!(
        "{}: {} overflow nodes, {} disconnected connections, total wirelength {}, critical wirelength {}",
        if v.is_legal() { "legal" } else { "illegal" },
        v.overflow_nodes,
        v.disconnected_connections,
        wl.total,
        wl.critical_path
    );
    Ok(if v.is_legal() { ExitCode::SUCCESS } else { ExitCode::from(ILLEGAL) })
}

fn describe(v: &Violation) -> String {
    match v {
        Violation::Overflow { node, nets } => format!("overflow: node {node} used by nets {nets:?}"),
        Violation::Unrouted { connection } => format!("unrouted: connection {connection}"),
        Violation::WrongEndpoints { connection } => format!("wrong endpoints: connection {connection}"),
        Violation::MissingEdge { connection, from, to } => format!("missing edge: connection {connection} uses {from} -> {to}"),
        Violation::UnknownNode { connection, node } => format!("unknown node: connection {connection} uses {node}"),
    }
}

fn score_cmd(a: &ScoreArgs) -> Result<ExitCode> {
    let wl = match (a.wirelength, &a.solution) {
        (Some(w), _) => w,
        (None, Some(sol)) => {
            let (rrg, nl) = (a.rrg.as_ref().unwrap(), a.netlist.as_ref().unwrap());
            let graph = load_rrg(rrg)?;
            let netlist = load_netlist(nl, &graph, DEFAULT_MARGIN)?;
            let solution = load_solution(sol, &graph, &netlist)?;
            wirelength(&graph, &netlist, &solution).critical_path as f64
        }
        (None, None) => anyhow::bail!("give --wirelength or --solution with --rrg and --netlist"),
    };
    println!("{:.4}", score(a.runtime, wl));
    Ok(ExitCode::SUCCESS)
}
