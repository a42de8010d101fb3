mod common;

use std::collections::{BTreeSet, HashSet};

use graphsci_core::generate::random_connected;
use graphsci_core::{bfs, prim_mst, BfsTermination, Termination, Topology};
use graphsci_testkit::{all_pairs_hops, components, kruskal_component_weight, random_edges};
use rand::Rng;

#[test]
fn full_bfs_matches_distance_oracle() {
    let mut rng = common::rng(1);
    for _ in 0..30 {
        let n = rng.gen_range(1..60);
        let edges = random_edges(n, rng.gen_range(0.03..0.3), &mut rng);
        let g = common::graph_from(n, &edges);
        let hops = all_pairs_hops(n, &edges);
        let start = rng.gen_range(0..n);
        let r = bfs(&g, start, &BfsTermination::default()).unwrap();

        assert_eq!(r.terminated_by, Termination::Exhausted);
        let visited: BTreeSet<usize> = r.order.iter().copied().collect();
        assert_eq!(visited.len(), r.order.len(), "duplicate visit");
        let reachable: BTreeSet<usize> = (0..n).filter(|&v| hops[start][v].is_some()).collect();
        assert_eq!(visited, reachable);
        for (&u, &d) in r.order.iter().zip(&r.depths) {
            assert_eq!(Some(d), hops[start][u]);
        }
        assert!(r.depths.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn depth_limit_bounds_visited_depths() {
    let mut rng = common::rng(2);
    for _ in 0..30 {
        let n = rng.gen_range(2..80);
        let edges = random_edges(n, 0.06, &mut rng);
        let g = common::graph_from(n, &edges);
        let hops = all_pairs_hops(n, &edges);
        let limit = rng.gen_range(0..6);
        let r = bfs(&g, 0, &BfsTermination::depth(limit)).unwrap();
        assert!(r.depths.iter().all(|&d| d <= limit));
        let expected: BTreeSet<usize> = (0..n).filter(|&v| hops[0][v].is_some_and(|d| d <= limit)).collect();
        assert_eq!(r.order.iter().copied().collect::<BTreeSet<_>>(), expected);
        let deeper_exists = (0..n).any(|v| hops[0][v].is_some_and(|d| d > limit));
        let expected_term = if deeper_exists {
            Termination::DepthLimit
        } else {
            Termination::Exhausted
        };
        assert_eq!(r.terminated_by, expected_term);
    }
}

#[test]
fn targets_hit_iff_reachable_within_depth() {
    let mut rng = common::rng(3);
    for _ in 0..60 {
        let n = rng.gen_range(2..50);
        let edges = random_edges(n, 0.05, &mut rng);
        let g = common::graph_from(n, &edges);
        let hops = all_pairs_hops(n, &edges);
        let targets: HashSet<usize> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..n)).collect();
        let limit = rng.gen_range(0..5);
        let term = BfsTermination {
            targets: Some(targets.clone()),
            max_depth: Some(limit),
            max_cost: None,
        };
        let r = bfs(&g, 0, &term).unwrap();
        let reachable = targets.iter().any(|&t| hops[0][t].is_some_and(|d| d <= limit));
        assert_eq!(r.terminated_by == Termination::TargetHit, reachable);
        if reachable {
            let last = *r.order.last().unwrap();
            assert!(targets.contains(&last));
            assert_eq!(r.order.iter().filter(|u| targets.contains(u)).count(), 1);
        }
    }
}

#[test]
fn cost_budget_accounting() {
    let mut rng = common::rng(4);
    for _ in 0..30 {
        let g = random_connected(40, 40, 9, rng.gen()).unwrap();
        let budget = rng.gen_range(0.0..60.0);
        let r = bfs(&g, 0, &BfsTermination::cost(budget)).unwrap();
        assert!(r.cost <= budget);
        let full = bfs(&g, 0, &BfsTermination::default()).unwrap();
        // same prefix as the unbounded traversal
        assert_eq!(r.order, full.order[..r.order.len()]);
        if r.order.len() < full.order.len() {
            assert_eq!(r.terminated_by, Termination::CostBudget);
        }
    }
}

#[test]
fn prim_matches_kruskal_oracle() {
    let mut rng = common::rng(5);
    for _ in 0..100 {
        let n = rng.gen_range(1..=100);
        let extra = rng.gen_range(0..2 * n);
        let g = random_connected(n, extra, 20, rng.gen()).unwrap();
        let start = rng.gen_range(0..n);
        let tree = prim_mst(&g, start).unwrap();
        assert_eq!(tree.total_weight, kruskal_component_weight(n, &g.edge_list(), start));
        assert_eq!(tree.edges.len(), n - 1);
    }
}

#[test]
fn prim_spans_exactly_the_start_component() {
    let mut rng = common::rng(6);
    for _ in 0..30 {
        let n = rng.gen_range(2..60);
        let plain = random_edges(n, 0.05, &mut rng);
        let edges: Vec<(usize, usize, f64)> = plain
            .iter()
            .map(|&(u, v)| (u, v, f64::from(rng.gen_range(1..9u8))))
            .collect();
        let g = common::weighted_graph_from(n, &edges);
        let start = rng.gen_range(0..n);
        let tree = prim_mst(&g, start).unwrap();
        let comp = components(n, &plain);
        let size = comp.iter().filter(|&&c| c == comp[start]).count();
        assert_eq!(tree.edges.len(), size - 1);
        let mut touched: BTreeSet<usize> = tree.edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
        touched.insert(start);
        assert_eq!(touched.len(), size);
        assert!(touched.iter().all(|&u| comp[u] == comp[start]));
        assert_eq!(tree.total_weight, kruskal_component_weight(n, &edges, start));
    }
}

#[test]
fn prim_rescaling_scales_weight_and_keeps_edges() {
    let mut rng = common::rng(7);
    let n = 30;
    // distinct weights
    let mut weights: Vec<f64> = (1..=200).map(f64::from).collect();
    let mut edges = Vec::new();
    for (u, v) in random_edges(n, 0.3, &mut rng) {
        let i = rng.gen_range(0..weights.len());
        edges.push((u, v, weights.swap_remove(i)));
        if weights.is_empty() {
            break;
        }
    }
    let g = common::weighted_graph_from(n, &edges);
    let scaled = common::weighted_graph_from(n, &edges.iter().map(|&(u, v, w)| (u, v, w * 4.0)).collect::<Vec<_>>());
    let a = prim_mst(&g, 0).unwrap();
    let b = prim_mst(&scaled, 0).unwrap();
    assert_eq!(b.total_weight, 4.0 * a.total_weight);
    let pairs = |t: &graphsci_core::SpanningTree| t.edges.iter().map(|&(u, v, _)| (u, v)).collect::<BTreeSet<_>>();
    assert_eq!(pairs(&a), pairs(&b));
}

#[test]
fn unbounded_bfs_on_sample_scale_graph_is_fast() {
    let g = graphsci_core::generate::gnm(800, 3000, 1).unwrap();
    let t = std::time::Instant::now();
    let r = bfs(&g, 0, &BfsTermination::default()).unwrap();
    assert!(t.elapsed().as_secs_f64() < 1.0);
    assert_eq!(r.terminated_by, Termination::Exhausted);
    assert!(r.order.len() > 700);
    assert!(g.node_count() == 800);
}
