use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Parallel negotiated-congestion router for island-style FPGA routing graphs.
///
/// Settings resolve in order: command-line flag, PARROUTE_* environment
/// variable, config file, built-in default.
#[derive(Debug, Parser)]
#[command(name = "parroute", version, propagate_version = true)]
pub struct Cli {
    /// TOML config file with defaults for route and bench settings.
    #[arg(long, global = true, env = "PARROUTE_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a routing graph and a synthetic netlist.
    Generate(GenerateArgs),
    /// Route a netlist, then write the solution and a report.
    Route(RouteArgs),
    /// Check a solution; exit 0 when legal, 1 when not.
    Validate(ValidateArgs),
    /// Compute the contest score (0.9 runtime + 0.1 critical wirelength).
    Score(ScoreArgs),
    /// Sweep thread counts, HUS on/off and schedulers; emit CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 8x8 grid, 50 nets.
    Tiny,
    /// 20x20 grid, 500 nets, locality 2, seed 11.
    Small,
    /// 48x48 grid, 2600 nets (about 10k connections).
    Large,
    /// 16x16 grid with one wire class and scarce pins; congested but routable.
    Congested,
    /// 32x32 grid, 1200 nets confined to the four quadrants.
    Quadrant,
}

/// Generator parameters. A preset fills in every unset value.
#[derive(Debug, Clone, Args)]
pub struct GenParams {
    /// Starting point for unset generator values.
    #[arg(long, value_enum, env = "PARROUTE_PRESET")]
    pub preset: Option<Preset>,
    /// Grid width in tiles [default: 20].
    #[arg(long, env = "PARROUTE_WIDTH")]
    pub width: Option<i32>,
    /// Grid height in tiles [default: width].
    #[arg(long, env = "PARROUTE_HEIGHT")]
    pub height: Option<i32>,
    /// Wire classes as length:tracks pairs; lengths must be 1, 2, 4 or 12
    /// [default: 1:4,2:2,4:2].
    #[arg(long, env = "PARROUTE_WIRES", value_name = "LEN:TRACKS,...")]
    pub wires: Option<String>,
    /// Fraction of wire-to-wire switches kept [default: 1.0].
    #[arg(long, env = "PARROUTE_SWITCH_DENSITY")]
    pub switch_density: Option<f64>,
    /// Pin nodes per tile [default: 12].
    #[arg(long, env = "PARROUTE_PINS")]
    pub pins: Option<u32>,
    /// Number of nets [default: 500].
    #[arg(long, env = "PARROUTE_NETS")]
    pub nets: Option<usize>,
    /// Mean sinks per net [default: 4].
    #[arg(long, env = "PARROUTE_FANOUT")]
    pub fanout: Option<f64>,
    /// Radius in tiles around the source where sinks are placed [default: 2].
    #[arg(long, env = "PARROUTE_LOCALITY")]
    pub locality: Option<i32>,
    /// Confine nets to the four grid quadrants.
    #[arg(long)]
    pub quadrant: bool,
    /// Generator seed [default: 11].
    #[arg(long, env = "PARROUTE_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub gen: GenParams,
    /// Output routing graph.
    #[arg(long, value_name = "FILE")]
    pub rrg: PathBuf,
    /// Output netlist.
    #[arg(long, value_name = "FILE")]
    pub netlist: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheduler {
    /// Ternary tree: mids are partitioned recursively.
    Rptt,
    /// Binary emulation: each mid set is one serial leaf.
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

/// Router and cost settings shared by route and bench.
#[derive(Debug, Clone, Default, Args)]
pub struct RouterFlags {
    /// Iteration budget [default: 500].
    #[arg(long, env = "PARROUTE_MAX_ITERATIONS")]
    pub max_iterations: Option<u32>,
    /// Bounding-box margin in tiles [default: 3].
    #[arg(long, env = "PARROUTE_MARGIN")]
    pub margin: Option<i32>,
    /// Present-cost scale p0 [default: 0.5].
    #[arg(long, env = "PARROUTE_P0")]
    pub p0: Option<f64>,
    /// Present-cost growth factor pf [default: 2].
    #[arg(long, env = "PARROUTE_PF")]
    pub pf: Option<f64>,
    /// Historical-cost factor hf [default: 1].
    #[arg(long, env = "PARROUTE_HF")]
    pub hf: Option<f64>,
    /// Present growth after the HUS switch [default: 1.1].
    #[arg(long, env = "PARROUTE_ALPHA")]
    pub alpha: Option<f64>,
    /// Historical factor after the HUS switch [default: 2].
    #[arg(long, env = "PARROUTE_BETA")]
    pub beta: Option<f64>,
    /// Overused-node to connection ratio that marks a design congested
    /// [default: 0.05].
    #[arg(long, env = "PARROUTE_CONGESTION_THRESHOLD")]
    pub congestion_threshold: Option<f64>,
    /// Last present-centric iteration of a congested design [default: 3].
    #[arg(long, env = "PARROUTE_SWITCH_ITERATION")]
    pub switch_iteration: Option<u32>,
    /// A* heuristic weight; 1 keeps it admissible [default: 1].
    #[arg(long, env = "PARROUTE_ASTAR_WEIGHT")]
    pub astar_weight: Option<f64>,
    /// Use the classic (b + h)·p node cost instead of b·h·p/(1 + share).
    #[arg(long)]
    pub legacy_cost: bool,
    /// Keep the present-centric coefficients for the whole run.
    #[arg(long)]
    pub no_hus: bool,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    /// Routing graph file.
    #[arg(long, value_name = "FILE")]
    pub rrg: PathBuf,
    /// Netlist file.
    #[arg(long, value_name = "FILE")]
    pub netlist: PathBuf,
    /// Where to write the solution.
    #[arg(long, value_name = "FILE")]
    pub solution: Option<PathBuf>,
    /// Where to write the report; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Report format [default: json].
    #[arg(long, value_enum, env = "PARROUTE_FORMAT")]
    pub format: Option<Format>,
    /// Append one JSON line of statistics per iteration to this file.
    #[arg(long, value_name = "FILE")]
    pub stats_jsonl: Option<PathBuf>,
    /// Write every iteration's partition tree as indented text.
    #[arg(long, value_name = "FILE")]
    pub dump_tree: Option<PathBuf>,
    /// Worker threads [default: 16].
    #[arg(long, env = "PARROUTE_THREADS")]
    pub threads: Option<usize>,
    /// Partition tree shape [default: rptt].
    #[arg(long, value_enum, env = "PARROUTE_SCHEDULER")]
    pub scheduler: Option<Scheduler>,
    #[command(flatten)]
    pub router: RouterFlags,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Routing graph file.
    #[arg(long, value_name = "FILE")]
    pub rrg: PathBuf,
    /// Netlist file.
    #[arg(long, value_name = "FILE")]
    pub netlist: PathBuf,
    /// Solution file.
    #[arg(long, value_name = "FILE")]
    pub solution: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Routing runtime in seconds.
    #[arg(long)]
    pub runtime: f64,
    /// Critical-path wirelength; computed from --solution when omitted.
    #[arg(long, conflicts_with = "solution")]
    pub wirelength: Option<f64>,
    /// Routing graph file, needed with --solution.
    #[arg(long, value_name = "FILE", requires = "solution")]
    pub rrg: Option<PathBuf>,
    /// Netlist file, needed with --solution.
    #[arg(long, value_name = "FILE", requires = "solution")]
    pub netlist: Option<PathBuf>,
    /// Solution file to measure.
    #[arg(long, value_name = "FILE", requires_all = ["rrg", "netlist"])]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Routing graph file; the benchmark is generated when absent.
    #[arg(long, value_name = "FILE", requires = "netlist")]
    pub rrg: Option<PathBuf>,
    /// Netlist file.
    #[arg(long, value_name = "FILE", requires = "rrg")]
    pub netlist: Option<PathBuf>,
    #[command(flatten)]
    pub gen: GenParams,
    /// Thread counts to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub threads: Vec<usize>,
    /// Schedulers to compare.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "rptt")]
    pub schedulers: Vec<Scheduler>,
    /// Also run without HUS and add ratio columns.
    #[arg(long)]
    pub hus_ablation: bool,
    /// Runs per configuration; the median runtime is reported.
    #[arg(long, default_value_t = 3)]
    pub repeat: usize,
    /// CSV output; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub router: RouterFlags,
}
