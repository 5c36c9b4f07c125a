mod common;

use std::collections::BTreeSet;

use common::{
    brute_force_betweenness, fixture_dir, fixture_ops, p, pairwise_modularity, random_connected, random_graph, seeded,
    PlainGraph,
};
use monobreak::community::{best_partition, edge_betweenness, girvan_newman, modularity, Betweenness};
use monobreak::graph::DependencyGraph;
use monobreak::ops::{aggregate_edge_calls, load_ops};
use monobreak::scanner::{scan_project, ScanConfig};
use monobreak::{Error, ModulePath};

fn set(ids: &[&str]) -> BTreeSet<ModulePath> {
    ids.iter().map(|s| p(s)).collect()
}

fn fixture_graph() -> DependencyGraph {
    let facts = scan_project(&fixture_dir(), &ScanConfig::default()).unwrap();
    let calls = aggregate_edge_calls(&load_ops(&fixture_ops()).unwrap(), &facts);
    let mut g = DependencyGraph::build_static(&facts);
    g.apply_dynamic(&calls);
    g.finalize_weights();
    g
}

/// a-b-c triangle and d-e-f triangle joined by c-d, unit weights.
fn two_triangles() -> PlainGraph {
    PlainGraph {
        n: 6,
        edges: vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1.0)],
    }
}

fn check_against_oracle(g: &PlainGraph, mode: Betweenness) {
    let lengths: Vec<f64> = g
        .edges
        .iter()
        .map(|&(_, _, w)| match mode {
            Betweenness::Weighted => 1.0 / w,
            Betweenness::Unweighted => 1.0,
        })
        .collect();
    let expected = brute_force_betweenness(g, &lengths, 1e-9);
    let actual = edge_betweenness(&g.to_graph(), mode);
    for (e, want) in expected.iter().enumerate() {
        let got = actual[&g.key(e)];
        assert!((got - want).abs() < 1e-9, "edge {:?}: got {got}, oracle {want} in {g:?}", g.edges[e]);
    }
}

#[test]
fn path_graph_betweenness() {
    let g = PlainGraph { n: 3, edges: vec![(0, 1, 1.0), (1, 2, 1.0)] };
    let eb = edge_betweenness(&g.to_graph(), Betweenness::Weighted);
    assert_eq!(eb[&g.key(0)], 2.0);
    assert_eq!(eb[&g.key(1)], 2.0);
}

#[test]
fn bridge_is_maximal() {
    let g = two_triangles();
    let eb = edge_betweenness(&g.to_graph(), Betweenness::Weighted);
    let bridge = eb[&g.key(6)];
    assert!((bridge - 9.0).abs() < 1e-12);
    for e in 0..6 {
        assert!(eb[&g.key(e)] < bridge);
    }
    check_against_oracle(&g, Betweenness::Weighted);
}

#[test]
fn betweenness_matches_oracle_weighted() {
    let mut rng = seeded(7);
    for _ in 0..60 {
        check_against_oracle(&random_connected(&mut rng, 7, 0.35), Betweenness::Weighted);
    }
}

#[test]
fn betweenness_matches_oracle_unweighted() {
    // unit lengths produce many equal-length paths
    let mut rng = seeded(11);
    for _ in 0..60 {
        check_against_oracle(&random_connected(&mut rng, 7, 0.4), Betweenness::Unweighted);
    }
}

#[test]
fn betweenness_disconnected_matches_oracle() {
    let mut rng = seeded(13);
    for _ in 0..40 {
        check_against_oracle(&random_graph(&mut rng, 7, 0.3), Betweenness::Weighted);
    }
}

#[test]
fn fixture_first_split() {
    let g = fixture_graph();
    let d = girvan_newman(&g, Betweenness::Weighted);
    assert_eq!(d.steps[0].partition.len(), 1);
    let first = &d.steps[1];
    assert_eq!(first.removed, Some((p("models.Item"), p("views.ViewOrder"))));
    assert_eq!(
        first.partition.communities,
        [
            set(&["models.Attribute", "models.Item", "serializers.ItemSerializer", "views.ViewItem"]),
            set(&["models.Order", "serializers.OrderSerializer", "views.ViewOrder"]),
        ]
    );
}

#[test]
fn fixture_best_partition_maximizes_modularity() {
    let g = fixture_graph();
    let d = girvan_newman(&g, Betweenness::Weighted);
    let best = best_partition(&g, None, Betweenness::Weighted).unwrap();
    assert_eq!(best.len(), 2);
    assert_eq!(best, d.steps[1].partition);
    for step in &d.steps {
        assert!(best.modularity >= step.partition.modularity);
    }
    assert!(best.modularity > d.steps[0].partition.modularity);
    assert!(d.steps[2..].iter().all(|s| s.partition.modularity < best.modularity));
}

#[test]
fn dendrogram_is_valid_at_every_step() {
    let mut rng = seeded(17);
    for _ in 0..30 {
        let pg = random_graph(&mut rng, 8, 0.4);
        let g = pg.to_graph();
        let d = girvan_newman(&g, Betweenness::Weighted);
        let mut last = 0;
        for step in &d.steps {
            let n = step.partition.len();
            assert!(n > last);
            last = n;
            assert!(modularity(&g, &step.partition.communities).is_ok());
        }
        assert_eq!(last, pg.n);
    }
}

#[test]
fn edgeless_and_single_node() {
    let g = PlainGraph { n: 4, edges: vec![] }.to_graph();
    let d = girvan_newman(&g, Betweenness::Weighted);
    assert_eq!(d.steps.len(), 1);
    assert_eq!(d.steps[0].partition.len(), 4);

    let g = PlainGraph { n: 1, edges: vec![] }.to_graph();
    let d = girvan_newman(&g, Betweenness::Weighted);
    assert_eq!(d.steps.len(), 1);
    assert_eq!(d.steps[0].partition.communities, [set(&["n0"])]);
}

#[test]
fn targets() {
    let pg = two_triangles();
    let g = pg.to_graph();
    let one = best_partition(&g, Some(1), Betweenness::Weighted).unwrap();
    assert_eq!(one.len(), 1);
    let all = best_partition(&g, Some(6), Betweenness::Weighted).unwrap();
    assert_eq!(all.len(), 6);
    let three = best_partition(&g, Some(3), Betweenness::Weighted).unwrap();
    assert!(three.len() >= 3);
    assert!(matches!(
        best_partition(&g, Some(7), Betweenness::Weighted),
        Err(Error::TooManyServices { requested: 7, nodes: 6 })
    ));
}

#[test]
fn uniform_weight_scaling_keeps_dendrogram() {
    let mut rng = seeded(19);
    for _ in 0..20 {
        let pg = random_connected(&mut rng, 8, 0.3);
        let scaled = PlainGraph { n: pg.n, edges: pg.edges.iter().map(|&(a, b, w)| (a, b, w * 8.0)).collect() };
        let d1 = girvan_newman(&pg.to_graph(), Betweenness::Weighted);
        let d2 = girvan_newman(&scaled.to_graph(), Betweenness::Weighted);
        let shape = |d: &monobreak::Dendrogram| {
            d.steps.iter().map(|s| (s.removed.clone(), s.partition.communities.clone())).collect::<Vec<_>>()
        };
        assert_eq!(shape(&d1), shape(&d2));
    }
}

#[test]
fn two_triangle_split_modularity() {
    let pg = two_triangles();
    let g = pg.to_graph();
    let split = [set(&["n0", "n1", "n2"]), set(&["n3", "n4", "n5"])];
    let q = modularity(&g, &split).unwrap();
    assert!((q - pairwise_modularity(&pg, &[0, 0, 0, 1, 1, 1])).abs() < 1e-12);
    let d = girvan_newman(&g, Betweenness::Weighted);
    assert_eq!(d.steps[1].partition.communities, split);
}

#[test]
fn modularity_sanity() {
    let mut rng = seeded(23);
    for _ in 0..50 {
        let pg = random_graph(&mut rng, 8, 0.4);
        let g = pg.to_graph();
        let all: BTreeSet<ModulePath> = g.nodes.keys().cloned().collect();
        assert!(modularity(&g, &[all]).unwrap().abs() < 1e-12);
        let singletons: Vec<BTreeSet<ModulePath>> = g.nodes.keys().map(|n| [n.clone()].into()).collect();
        let q = modularity(&g, &singletons).unwrap();
        if pg.edges.is_empty() {
            assert_eq!(q, 0.0);
        } else {
            assert!(q < 0.0);
        }
    }
}

#[test]
fn modularity_rejects_bad_partitions() {
    let g = two_triangles().to_graph();
    assert!(matches!(modularity(&g, &[set(&["n0", "n1"])]), Err(Error::Partition(_))));
    let overlapping = [set(&["n0", "n1", "n2", "n3"]), set(&["n3", "n4", "n5"])];
    assert!(matches!(modularity(&g, &overlapping), Err(Error::Partition(_))));
}
