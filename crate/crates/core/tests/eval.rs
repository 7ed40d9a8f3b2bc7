use std::collections::{BTreeSet, HashMap};

use parroute::eval::{emit_report, load_solution, render_report, save_solution, ReportFormat, CSV_COLUMNS};
use parroute::netlist::generate_benchmark;
use parroute::rrg::save_rrg;
use parroute::{
    route_all, score, validate, wirelength, BenchmarkSpec, GridSpec, RouterConfig, RoutingGraph, RoutingReport, Solution,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn routed(w: i32, nets: usize, seed: u64) -> (RoutingGraph, parroute::Netlist, parroute::RoutingResult) {
    let g = RoutingGraph::generate(&GridSpec::new(w, w).with_pins(12).with_seed(seed)).unwrap();
    let nl = generate_benchmark(&g, &BenchmarkSpec::new(nets, 2, seed)).unwrap();
    let r = route_all(&g, &nl, RouterConfig::default().with_threads(2)).unwrap();
    assert!(r.success);
    (g, nl, r)
}

#[test]
fn corrupted_paths_are_caught() {
    let (g, nl, r) = routed(12, 80, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut injected = 0;
    for _ in 0..200 {
        let mut paths = r.paths.clone();
        let c = rng.random_range(0..paths.len());
        if paths[c].len() < 3 {
            continue;
        }
        // Drop one interior hop: the neighbours around it are never
        // directly connected in an island grid (pin -> wire -> pin).
        let k = rng.random_range(1..paths[c].len() - 1);
        let (a, b) = (paths[c][k - 1], paths[c][k + 1]);
        paths[c].remove(k);
        if g.has_edge(a, b) {
            continue;
        }
        let v = validate(&g, &nl, &Solution::new(paths));
        assert!(v.disconnected_connections >= 1);
        injected += 1;
    }
    assert!(injected >= 50);
}

#[test]
fn total_wirelength_matches_file_recount() {
    let (g, nl, r) = routed(20, 500, 11);
    let dir = tempfile::tempdir().unwrap();
    let (gpath, spath) = (dir.path().join("g.rrg"), dir.path().join("s.sol"));
    save_rrg(&g, &gpath).unwrap();
    let sol = Solution::new(r.paths);
    save_solution(&sol, &nl, &spath).unwrap();

    // Lengths from the graph file and paths from the solution file.
    let lengths: HashMap<u32, u64> = std::fs::read_to_string(&gpath)
        .unwrap()
        .lines()
        .filter_map(|l| l.strip_prefix("N "))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[0].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    let mut per_net: HashMap<u32, BTreeSet<u32>> = HashMap::new();
    let mut critical = 0;
    for line in std::fs::read_to_string(&spath).unwrap().lines() {
        let f: Vec<u32> = line.split_whitespace().skip(1).map(|t| t.parse().unwrap()).collect();
        critical = critical.max(f[2..].iter().map(|n| lengths[n]).sum::<u64>());
        per_net.entry(f[0]).or_default().extend(&f[2..]);
    }
    let total: u64 = per_net.values().flat_map(|s| s.iter().map(|n| lengths[n])).sum();

    let wl = wirelength(&g, &nl, &sol);
    assert_eq!((wl.total, wl.critical_path), (total, critical));
    assert_eq!(load_solution(&spath, &g, &nl).unwrap(), sol);
}

#[test]
fn reports_keep_a_fixed_schema() {
    let (g, nl, r) = routed(10, 40, 2);
    let report = RoutingReport::build(&g, &nl, &Solution::new(r.paths), r.runtime.as_secs_f64(), r.iterations);
    let dir = tempfile::tempdir().unwrap();
    for (i, rep) in [RoutingReport::empty(), report].iter().enumerate() {
        let json = dir.path().join(format!("{i}.json"));
        emit_report(rep, &json, ReportFormat::Json).unwrap();
        let back: RoutingReport = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(&back, rep);

        let csv_text = render_report(rep, ReportFormat::Csv).unwrap();
        let mut rd = csv::Reader::from_reader(csv_text.as_bytes());
        assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_COLUMNS);
        let rows: Vec<_> = rd.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].len(), CSV_COLUMNS.len());
    }
    let path = dir.path().join("missing").join("r.json");
    assert!(emit_report(&RoutingReport::empty(), path, ReportFormat::Json).is_err());
}

#[test]
fn score_is_linear_in_runtime() {
    for (a, b) in [(1.5, 2.25), (10.0, 0.5), (0.0, 7.0)] {
        assert!((score(a + b, 0.0) - (score(a, 0.0) + score(b, 0.0))).abs() < 1e-12);
    }
    assert_eq!(score(100.0, 300.0), 120.0);
}
