mod common;

use std::collections::{BTreeSet, HashMap};

use parroute::cost::estimate_to_sink;
use parroute::netlist::{generate_benchmark, Net};
use parroute::router::{check_schedule, search};
use parroute::{
    route_all, validate, BenchmarkSpec, GridSpec, Netlist, NodeId, Router, RouterConfig, RoutingGraph, RpttNode, RrgNode,
    Solution, Tile,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn serial() -> RouterConfig {
    RouterConfig::default().with_threads(1)
}

fn pins(g: &RoutingGraph) -> Vec<NodeId> {
    g.nodes().iter().filter(|n| n.length == 0).map(|n| n.id).collect()
}

#[test]
fn astar_cost_equals_dijkstra() {
    let g = RoutingGraph::generate(
        &GridSpec::new(8, 8).with_wires([(1, 2), (2, 1), (4, 1)]).with_switch_density(0.8).with_pins(2).with_seed(17),
    )
    .unwrap();
    let pins = pins(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let s = pins[rng.random_range(0..pins.len())];
        let t = pins[rng.random_range(0..pins.len())];
        if g.node(s).anchor() == g.node(t).anchor() {
            continue;
        }
        let oracle = common::dijkstra(&g, s, t);
        let found = search(&g, s, t, g.bounds(), 1.0, |n| g.node(n).base_cost);
        assert_eq!(found.as_ref().map(|f| f.1), oracle, "{s}->{t}");
        if let Some((path, cost)) = found {
            assert_eq!(common::path_cost(&g, &path), cost);
            assert!(path.windows(2).all(|w| g.has_edge(w[0], w[1])));
        }
    }
}

#[test]
fn heuristic_never_overestimates() {
    let g = RoutingGraph::generate(&GridSpec::new(8, 8).with_wires([(1, 2), (2, 1), (12, 1)]).with_pins(2).with_seed(5)).unwrap();
    let pins = pins(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = 0;
    for _ in 0..30 {
        let sink = pins[rng.random_range(0..pins.len())];
        let dist = common::cost_to_sink(&g, sink);
        for _ in 0..10 {
            let n = rng.random_range(0..g.node_count() as u32);
            if g.node(n).length == 0 || !dist[n as usize].is_finite() {
                continue;
            }
            assert!(estimate_to_sink(&g, n, sink, 1.0) <= dist[n as usize] + 1e-12);
            pairs += 1;
        }
    }
    assert!(pairs >= 100, "{pairs}");
}

#[test]
fn same_net_connections_share_a_trunk() {
    let g = RoutingGraph::generate(&GridSpec::new(4, 4).with_wires([(1, 1)]).with_pins(2)).unwrap();
    let src = g.pins_at(Tile::new(0, 0))[0];
    let sinks = vec![g.pins_at(Tile::new(3, 0))[0], g.pins_at(Tile::new(3, 1))[0]];
    let nl = Netlist::new(&g, vec![Net { id: 0, source: src, sinks: sinks.clone() }], 3).unwrap();
    let r = route_all(&g, &nl, serial()).unwrap();
    assert!(r.success);
    let routed = common::union_wirelength(&g, &r.paths.iter().collect::<Vec<_>>());

    // Exhaustive over all short simple paths of each connection.
    let a = common::simple_paths(&g, src, sinks[0], 8);
    let b = common::simple_paths(&g, src, sinks[1], 8);
    let wl = |p: &Vec<NodeId>| common::union_wirelength(&g, &[p]);
    let independent = a.iter().map(wl).min().unwrap() + b.iter().map(wl).min().unwrap();
    let best_joint =
        a.iter().flat_map(|p| b.iter().map(move |q| (p, q))).map(|(p, q)| common::union_wirelength(&g, &[p, q])).min().unwrap();
    assert_eq!(independent, 7);
    assert_eq!(best_joint, 4);
    assert!(routed < independent);
    assert_eq!(routed, best_joint);
}

fn bottleneck_graph() -> RoutingGraph {
    let mk = |id, length: u8| RrgNode {
        id,
        tile_x: 0,
        tile_y: 0,
        length,
        base_cost: if length == 0 { 0.5 } else { 1.0 },
        exit_x: 0,
        exit_y: 0,
    };
    // Pins 0,1 drive; pins 2,3 receive. Node 4 is the single shared wire;
    // 5 -> 6 is a longer detour available to the second source.
    let nodes = vec![mk(0, 0), mk(1, 0), mk(2, 0), mk(3, 0), mk(4, 1), mk(5, 1), mk(6, 1)];
    let edges = [(0, 4), (1, 4), (4, 2), (4, 3), (1, 5), (5, 6), (6, 3)];
    RoutingGraph::from_parts(1, 1, nodes, &edges).unwrap()
}

#[test]
fn bottleneck_resolves_through_detour() {
    let g = bottleneck_graph();
    let nets = vec![Net { id: 0, source: 0, sinks: vec![2] }, Net { id: 1, source: 1, sinks: vec![3] }];
    let nl = Netlist::new(&g, nets, 0).unwrap();
    let r = route_all(&g, &nl, serial()).unwrap();
    assert!(r.success);
    let users = r.paths.iter().filter(|p| p.contains(&4)).count();
    assert!(users <= 1);

    let a = common::simple_paths(&g, 0, 2, 6);
    let b = common::simple_paths(&g, 1, 3, 6);
    let legal_best = a
        .iter()
        .flat_map(|p| b.iter().map(move |q| (p, q)))
        .filter(|(p, q)| p.iter().all(|n| !q.contains(n)))
        .map(|(p, q)| common::path_cost(&g, p) + common::path_cost(&g, q))
        .fold(f64::INFINITY, f64::min);
    let routed: f64 = r.paths.iter().map(|p| common::path_cost(&g, p)).sum();
    assert_eq!(routed, legal_best);
}

/// Distinct-net occupancy and per-net usage recomputed from paths alone.
fn recount(nl: &Netlist, paths: &[Vec<NodeId>], nodes: usize) -> (Vec<u32>, Vec<HashMap<NodeId, u32>>) {
    let mut usage = vec![HashMap::new(); nl.nets().len()];
    for (i, p) in paths.iter().enumerate() {
        for &n in p {
            *usage[nl.connection(i as u32).net_id as usize].entry(n).or_insert(0) += 1;
        }
    }
    let mut occ = vec![0u32; nodes];
    for u in &usage {
        for &n in u.keys() {
            occ[n as usize] += 1;
        }
    }
    (occ, usage)
}

#[test]
fn counters_match_recount_after_random_operations() {
    let g = RoutingGraph::generate(&GridSpec::new(8, 8).with_wires([(1, 2), (2, 1)]).with_seed(2)).unwrap();
    let nl = generate_benchmark(&g, &BenchmarkSpec::new(60, 2, 2)).unwrap();
    let router = Router::new(&g, &nl, serial()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = nl.connections().len() as u32;
    for op in 0..1200 {
        let c = rng.random_range(0..n);
        if rng.random_bool(0.6) {
            router.route_connection(c).unwrap();
        } else {
            router.rip_up(c);
        }
        if op % 100 == 99 {
            let paths: Vec<_> = (0..n).map(|i| router.path(i)).collect();
            let (occ, usage) = recount(&nl, &paths, g.node_count());
            assert_eq!(router.congestion().occupancy_snapshot(), occ);
            assert_eq!(router.congestion().overused(), occ.iter().filter(|&&o| o > 1).count());
            for (net, u) in usage.iter().enumerate() {
                assert_eq!(&router.net_usage(net as u32), u);
            }
        }
    }
    for c in 0..n {
        router.rip_up(c);
    }
    assert!(router.congestion().occupancy_snapshot().iter().all(|&o| o == 0));
    assert_eq!(router.congestion().overused(), 0);
}

/// Mid-before-sides and per-net exclusivity, checked directly from events.
fn oracle_violations(tree: &RpttNode, events: &HashMap<u32, (u128, u128, u32)>) -> usize {
    let mut bad = 0;
    tree.visit(&mut |n| {
        if let Some(mid) = &n.mid {
            let mid_end = mid.connections.iter().map(|c| events[c].1).max();
            let side_start = [&n.left, &n.right].into_iter().flatten().flat_map(|s| &s.connections).map(|c| events[c].0).min();
            if let (Some(e), Some(s)) = (mid_end, side_start) {
                bad += usize::from(e > s);
            }
        }
    });
    let mut by_net: HashMap<u32, Vec<(u128, u128)>> = HashMap::new();
    for &(s, e, net) in events.values() {
        by_net.entry(net).or_default().push((s, e));
    }
    for v in by_net.values_mut() {
        v.sort_unstable();
        bad += v.windows(2).filter(|w| w[0].1 > w[1].0).count();
    }
    bad
}

#[test]
fn schedule_contract_holds_over_fifty_runs() {
    let g = RoutingGraph::generate(&GridSpec::new(16, 16).with_seed(7)).unwrap();
    let nl = generate_benchmark(&g, &BenchmarkSpec::new(150, 3, 7)).unwrap();
    let mut cfg = RouterConfig::default().with_threads(8);
    cfg.trace = true;
    let mut with_mids = 0;
    for _ in 0..50 {
        let r = route_all(&g, &nl, cfg.clone()).unwrap();
        assert!(r.success);
        assert_eq!(r.intra_net_conflicts, 0);
        for (tree, events) in &r.trace {
            assert!(check_schedule(tree, events).is_clean());
            let map: HashMap<u32, (u128, u128, u32)> =
                events.iter().map(|e| (e.connection, (e.start.as_nanos(), e.end.as_nanos(), e.net))).collect();
            assert_eq!(map.len(), tree.connections.len());
            assert_eq!(oracle_violations(tree, &map), 0);
            tree.visit(&mut |n| with_mids += usize::from(n.mid.is_some()));
        }
    }
    assert!(with_mids > 0, "instance never exercised a mid subtree");
}

#[test]
fn single_leaf_is_thread_count_independent() {
    let g = RoutingGraph::generate(&GridSpec::new(6, 6).with_seed(1)).unwrap();
    let src = g.pins_at(Tile::new(0, 0))[0];
    let sinks: Vec<NodeId> = (1..5).map(|x| g.pins_at(Tile::new(x, x))[0]).collect();
    let nl = Netlist::new(&g, vec![Net { id: 0, source: src, sinks }], 3).unwrap();
    let a = route_all(&g, &nl, serial()).unwrap();
    for t in [2, 4, 8] {
        assert_eq!(route_all(&g, &nl, RouterConfig::default().with_threads(t)).unwrap().paths, a.paths);
    }
}

#[test]
fn legal_at_every_thread_count() {
    let g = RoutingGraph::generate(&GridSpec::new(16, 16).with_seed(3)).unwrap();
    let nl = generate_benchmark(&g, &BenchmarkSpec::new(300, 2, 3)).unwrap();
    for t in [1, 2, 4, 8, 16] {
        let r = route_all(&g, &nl, RouterConfig::default().with_threads(t)).unwrap();
        assert!(r.success, "{t} threads");
        assert!(validate(&g, &nl, &Solution::new(r.paths)).is_legal(), "{t} threads");
    }
}

#[test]
fn preset_500_nets_converges() {
    let g = RoutingGraph::generate(&GridSpec::new(20, 20).with_pins(12).with_seed(11)).unwrap();
    let nl = generate_benchmark(&g, &BenchmarkSpec::new(500, 2, 11)).unwrap();
    let r = route_all(&g, &nl, RouterConfig::default()).unwrap();
    assert!(r.success && r.iterations.len() <= 500);
    assert!(validate(&g, &nl, &Solution::new(r.paths)).is_legal());
    let nets: BTreeSet<u32> = nl.connections().iter().map(|c| c.net_id).collect();
    assert_eq!(nets.len(), 500);
}

#[test]
fn historical_cost_never_decreases() {
    let g = RoutingGraph::generate(&GridSpec::new(16, 16).with_wires([(1, 3)]).with_pins(4).with_seed(4)).unwrap();
    let nl = generate_benchmark(&g, &BenchmarkSpec::new(180, 4, 4)).unwrap();
    let mut router = Router::new(&g, &nl, serial()).unwrap();
    let before = router.congestion().historical_snapshot();
    let r = router.route_all().unwrap();
    assert!(r.success && r.final_state.congested_design);
    let after = router.congestion().historical_snapshot();
    assert!(before.iter().zip(&after).all(|(b, a)| a >= b && *a >= 1.0));
    assert!(after.iter().any(|&h| h > 1.0));
}
