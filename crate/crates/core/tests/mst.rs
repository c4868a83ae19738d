use grc_core::engine::{RunStatus, SeededStreams};
use grc_core::graph::{generate, oracle, Graph, GraphKind, WeightMode};
use grc_core::mst::mst_construct;

const MAX_ROUNDS: u64 = 1_000_000;

#[test]
fn triangle_takes_two_lightest_edges() {
    let mut g = Graph::from_edges(3, 3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    g.set_weights(vec![1, 2, 3]).unwrap();
    for seed in 0..10 {
        let run = mst_construct(&g, 3, &SeededStreams(seed), MAX_ROUNDS).unwrap();
        assert_eq!(run.status, RunStatus::Completed);
        assert_eq!(run.tree_edges, vec![0, 1]);
        assert_eq!(run.weight, 3);
    }
}

#[test]
fn star_keeps_every_edge() {
    let g = generate(
        GraphKind::Star { n: 5 },
        Some(WeightMode::Uniform { max: 9 }),
        3,
        4,
    )
    .unwrap();
    let run = mst_construct(&g, 3, &SeededStreams(1), MAX_ROUNDS).unwrap();
    assert_eq!(run.tree_edges, vec![0, 1, 2, 3]);
    assert!(run.diagnostics.is_spanning_tree);
}

#[test]
fn single_node_terminates_immediately() {
    let mut g = Graph::new(1, 3);
    g.set_weights(vec![]).unwrap();
    let run = mst_construct(&g, 3, &SeededStreams(0), MAX_ROUNDS).unwrap();
    assert_eq!(run.status, RunStatus::Completed);
    assert!(run.tree_edges.is_empty());
    assert_eq!(run.phases, 0);
}

#[test]
fn equal_weights_still_give_a_spanning_tree() {
    let g = generate(
        GraphKind::Complete { n: 10 },
        Some(WeightMode::AllEqual),
        3,
        2,
    )
    .unwrap();
    for seed in 0..5 {
        let run = mst_construct(&g, 3, &SeededStreams(seed), MAX_ROUNDS).unwrap();
        assert!(
            run.diagnostics.is_spanning_tree,
            "seed {seed}: {:?}",
            run.diagnostics
        );
        assert_eq!(run.weight, 9);
    }
}

#[test]
fn heavy_ties_never_close_a_cycle() {
    for seed in 0..40 {
        let g = generate(
            GraphKind::GnpConnected { n: 24, p: 0.3 },
            Some(WeightMode::Uniform { max: 2 }),
            3,
            seed,
        )
        .unwrap();
        let (w, _) = oracle::oracle_mst(&g).unwrap();
        let run = mst_construct(&g, 3, &SeededStreams(seed), MAX_ROUNDS).unwrap();
        assert!(!run.diagnostics.has_cycle, "seed {seed}");
        assert!(run.diagnostics.is_spanning_tree, "seed {seed}");
        assert_eq!(run.weight, w, "seed {seed}");
    }
}

#[test]
fn random_graphs_match_kruskal() {
    let mut ok = 0;
    let trials = 30;
    for seed in 0..trials {
        let g = generate(
            GraphKind::GnpConnected { n: 32, p: 0.25 },
            Some(WeightMode::Uniform { max: 16 }),
            3,
            seed,
        )
        .unwrap();
        let (w, _) = oracle::oracle_mst(&g).unwrap();
        let run = mst_construct(&g, 3, &SeededStreams(seed + 1000), MAX_ROUNDS).unwrap();
        assert_eq!(run.status, RunStatus::Completed);
        let d = &run.diagnostics;
        if run.weight == w && d.is_spanning_tree {
            ok += 1;
        }
        assert_eq!(d.asymmetric_edges, 0);
        if d.detection_errors == 0 {
            assert_eq!(d.halving_violations, 0, "{d:?}");
        }
        assert!(
            run.phases as f64 <= 2.0 * 5.0 + 1.0,
            "phases {}",
            run.phases
        );
    }
    assert!(ok >= trials - 1, "{ok}/{trials}");
}
