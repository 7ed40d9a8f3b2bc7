//! Settings resolution: flag or environment (both handled by clap), then
//! the config file, then built-in defaults.

use std::path::Path;

use anyhow::{Context, Result};
use parroute::{CostConfig, RouterConfig, TreeShape};
use serde::Deserialize;

use crate::args::{Format, RouterFlags, Scheduler};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub max_iterations: Option<u32>,
    pub margin: Option<i32>,
    pub scheduler: Option<Scheduler>,
    pub format: Option<Format>,
    pub cost: CostConfig,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Router settings plus the margin used when loading netlists.
pub struct Resolved {
    pub router: RouterConfig,
    pub margin: i32,
}

pub fn resolve(flags: &RouterFlags, threads: Option<usize>, scheduler: Option<Scheduler>, file: &FileConfig) -> Result<Resolved> {
    let mut cost = file.cost.clone();
    let overrides = [
        (flags.p0, &mut cost.p0),
        (flags.pf, &mut cost.pf),
        (flags.hf, &mut cost.hf),
        (flags.alpha, &mut cost.alpha),
        (flags.beta, &mut cost.beta),
        (flags.congestion_threshold, &mut cost.congestion_threshold),
        (flags.astar_weight, &mut cost.astar_weight),
    ];
    for (flag, slot) in overrides {
        if let Some(v) = flag {
            *slot = v;
        }
    }
    if let Some(s) = flags.switch_iteration {
        cost.switch_iteration = s;
    }
    cost.legacy_mode |= flags.legacy_cost;
    cost.hus &= !flags.no_hus;

    let defaults = RouterConfig::default();
    let router = RouterConfig {
        cost,
        threads: threads.or(file.threads).unwrap_or(defaults.threads),
        max_iterations: flags.max_iterations.or(file.max_iterations).unwrap_or(defaults.max_iterations),
        tree_shape: match scheduler.or(file.scheduler).unwrap_or(Scheduler::Rptt) {
            Scheduler::Rptt => TreeShape::Ternary,
            Scheduler::Binary => TreeShape::Binary,
        },
        ..defaults
    };
    router.validate()?;
    Ok(Resolved { router, margin: flags.margin.or(file.margin).unwrap_or(parroute::netlist::DEFAULT_MARGIN) })
}
