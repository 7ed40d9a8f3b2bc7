use parroute::netlist::{generate_benchmark, generate_quadrant_benchmark, load_netlist, save_netlist, DEFAULT_MARGIN};
use parroute::{BenchmarkSpec, GridSpec, Netlist, RoutingGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(w: i32, pins: u32, seed: u64) -> RoutingGraph {
    RoutingGraph::generate(&GridSpec::new(w, w).with_pins(pins).with_seed(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn generator_is_deterministic(w in 4i32..14, half in 0usize..=100, loc in 1i32..4, fanout in 1.0f64..5.0, seed in any::<u64>()) {
        // At most w²/2 nets of at most 17 pins always fit in 12 pins per tile.
        let nets = (w * w) as usize * half / 200;
        let g = grid(w, 12, seed);
        let spec = BenchmarkSpec::new(nets, loc, seed).with_fanout(fanout);
        let a = generate_benchmark(&g, &spec).unwrap();
        let b = generate_benchmark(&g, &spec).unwrap();
        prop_assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn connections_follow_nets(w in 4i32..12, half in 1usize..=100, seed in any::<u64>()) {
        let nets = ((w * w) as usize * half / 200).max(1);
        let g = grid(w, 12, seed);
        let nl = generate_benchmark(&g, &BenchmarkSpec::new(nets, 2, seed)).unwrap();
        let total: usize = nl.nets().iter().map(|n| n.sinks.len()).sum();
        prop_assert_eq!(nl.connections().len(), total);
        for c in nl.connections() {
            let net = &nl.nets()[c.net_id as usize];
            prop_assert_eq!(c.source, net.source);
            prop_assert_eq!(c.sink, net.sinks[c.sink_index as usize]);
            for t in [g.node(c.source).anchor(), g.node(c.sink).anchor()] {
                prop_assert!(c.bbox.contains(t) && c.search_bbox.contains(t));
            }
        }
    }
}

#[test]
fn local_connections_have_small_boxes() {
    let g = grid(20, 12, 11);
    let m = DEFAULT_MARGIN;
    let nl = generate_benchmark(&g, &BenchmarkSpec::new(500, 2, 11)).unwrap();
    // Measured from the endpoints alone, independent of the stored boxes.
    let limit = u64::from((2 * 2 + 1 + 2 * m as u32).pow(2));
    let small = nl
        .connections()
        .iter()
        .filter(|c| {
            let (a, b) = (g.node(c.source).anchor(), g.node(c.sink).anchor());
            let w = u64::from(a.x.abs_diff(b.x)) + 1 + 2 * m as u64;
            let h = u64::from(a.y.abs_diff(b.y)) + 1 + 2 * m as u64;
            w * h <= limit
        })
        .count();
    let frac = small as f64 / nl.connections().len() as f64;
    assert!(frac >= 0.9, "only {frac:.3} of connections are local");
}

#[test]
fn connection_count_matches_independent_fanout_recount() {
    let g = grid(40, 16, 5);
    let nl = generate_benchmark(&g, &BenchmarkSpec::new(1000, 3, 5)).unwrap();
    let text = nl.to_text();
    let recount: usize = text.lines().map(|l| l.split_whitespace().count() - 3).sum();
    assert_eq!(text.lines().count(), 1000);
    assert_eq!(nl.connections().len(), recount);
    let mean = recount as f64 / 1000.0;
    assert!((3.0..5.0).contains(&mean), "mean fanout {mean}");
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = grid(20, 12, 11);
    for (name, nl) in [("empty", Netlist::empty()), ("b500", generate_benchmark(&g, &BenchmarkSpec::new(500, 2, 11)).unwrap())] {
        let a = dir.path().join(format!("{name}.a"));
        let b = dir.path().join(format!("{name}.b"));
        save_netlist(&nl, &a).unwrap();
        let back = load_netlist(&a, &g, DEFAULT_MARGIN).unwrap();
        assert_eq!(back, nl);
        save_netlist(&back, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn unknown_sink_is_a_parse_error() {
    let g = grid(4, 4, 1);
    let bad = format!("NET 0 0 {}\n", g.node_count() + 5);
    assert!(Netlist::from_reader(bad.as_bytes(), &g, DEFAULT_MARGIN).is_err());
}

#[test]
fn quadrant_boxes_mostly_avoid_the_centre_lines() {
    let g = grid(32, 8, 4);
    let nl = generate_quadrant_benchmark(&g, &BenchmarkSpec::new(600, 3, 4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let c = nl.connection(rng.random_range(0..nl.connections().len() as u32));
        let (a, b) = (g.node(c.source).anchor(), g.node(c.sink).anchor());
        assert_eq!(a.x < 16, b.x < 16);
        assert_eq!(a.y < 16, b.y < 16);
    }
}
