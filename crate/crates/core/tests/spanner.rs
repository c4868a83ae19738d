use grc_core::engine::{RunStatus, SeededStreams};
use grc_core::graph::{generate, oracle, Graph, GraphKind};
use grc_core::spanner::geomcap::{first_success_pmf, geomcap_sample, near_max_count};
use grc_core::spanner::{
    draw_rounds, sample_deltas, spanner_construct, spanner_construct_low_memory,
    spanner_with_deltas, SamplerConfig,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAX_ROUNDS: u64 = 5_000_000;

fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    generate(GraphKind::GnpConnected { n, p }, None, 3, seed).unwrap()
}

/// `min_x (kappa - delta_x + d(x, v))` from all-pairs BFS.
fn virtual_oracle(g: &Graph, kappa: u32, deltas: &[u32]) -> Vec<u32> {
    let all: Vec<usize> = (0..g.m()).collect();
    let d = oracle::oracle_distances(g, &all);
    (0..g.n())
        .map(|v| {
            (0..g.n())
                .filter(|&x| d[x][v] != oracle::UNREACHABLE)
                .map(|x| kappa - deltas[x] + d[x][v])
                .min()
                .unwrap()
        })
        .collect()
}

fn max_stretch(g: &Graph, h: &[usize]) -> u32 {
    let d = oracle::oracle_distances(g, h);
    g.edges().iter().map(|&(u, v)| d[u][v]).max().unwrap_or(0)
}

#[test]
fn kappa_one_keeps_every_edge() {
    let cfg = SamplerConfig::new(1, 0.5, 2).unwrap();
    for seed in 0..5 {
        let g = gnp(20, 0.3, seed);
        let run = spanner_construct(&g, cfg, &SeededStreams(seed), MAX_ROUNDS).unwrap();
        assert_eq!(run.status, RunStatus::Completed);
        assert!(run.deltas.iter().all(|&d| d == 0));
        assert!(run.centers.iter().all(|&c| c));
        assert_eq!(run.h_edges, (0..g.m()).collect::<Vec<_>>());
        assert_eq!(max_stretch(&g, &run.h_edges), 1);
    }
}

#[test]
fn tree_input_is_kept_whole() {
    let cfg = SamplerConfig::new(3, 0.5, 2).unwrap();
    let g = generate(GraphKind::TreePlusChords { n: 30, chords: 0 }, None, 3, 7).unwrap();
    let run = spanner_construct(&g, cfg, &SeededStreams(3), MAX_ROUNDS).unwrap();
    assert_eq!(run.h_edges.len(), g.m());
    assert_eq!(run.diagnostics.max_stretch, Some(1));
}

#[test]
fn maximal_deltas_give_singleton_clusters() {
    let cfg = SamplerConfig::new(4, 0.5, 2).unwrap();
    let g = gnp(16, 0.3, 1);
    let run = spanner_with_deltas(&g, cfg, &[3; 16], &SeededStreams(0), MAX_ROUNDS).unwrap();
    assert!(run.centers.iter().all(|&c| c));
    assert!(run.tree_edges.is_empty());
    assert!(run.levels.iter().all(|&l| l == Some(0)));
}

#[test]
fn path_grows_from_the_early_center() {
    let cfg = SamplerConfig::new(3, 0.5, 2).unwrap();
    let g = Graph::from_edges(3, 3, &[(0, 1), (1, 2)]).unwrap();
    let run = spanner_with_deltas(&g, cfg, &[2, 0, 0], &SeededStreams(0), MAX_ROUNDS).unwrap();
    assert_eq!(run.centers, vec![true, false, false]);
    assert_eq!(run.outputs[1].parent, Some(0));
    assert_eq!(run.outputs[2].parent, Some(0));
    assert_eq!(run.levels, vec![Some(0), Some(1), Some(2)]);
    assert_eq!(run.h_edges, vec![0, 1]);
    let distances: Vec<u32> = run.outputs.iter().map(|o| o.distance).collect();
    assert_eq!(distances, vec![1, 2, 3]);
}

#[test]
fn clusters_follow_the_virtual_root_tree() {
    let cfg = SamplerConfig::new(3, 0.5, 2).unwrap();
    for seed in 0..20 {
        let g = gnp(64, 0.08, seed);
        let run = spanner_construct(&g, cfg, &SeededStreams(seed + 100), MAX_ROUNDS).unwrap();
        let expect = virtual_oracle(&g, cfg.kappa, &run.deltas);
        let got: Vec<u32> = run.outputs.iter().map(|o| o.distance).collect();
        assert_eq!(got, expect, "seed {seed}");
        let d = &run.diagnostics;
        assert!(d.clusters_ok(), "seed {seed}: {d:?}");
        assert!(d.max_level < cfg.kappa);
        assert!(run.tree_edges.iter().all(|e| run.h_edges.contains(e)));
    }
}

#[test]
fn event_b_and_stretch_hold_on_almost_all_runs() {
    let cfg = SamplerConfig::new(3, 0.5, 2).unwrap();
    let seeds = 200;
    let mut b_ok = 0;
    for seed in 0..seeds {
        let g = gnp(64, 0.1, seed);
        let run = spanner_construct(&g, cfg, &SeededStreams(seed ^ 0xabc), MAX_ROUNDS).unwrap();
        let d = &run.diagnostics;
        assert_eq!(d.r_violations, 0, "seed {seed}");
        if d.event_b_failures == 0 {
            b_ok += 1;
            assert!(max_stretch(&g, &run.h_edges) < 2 * cfg.kappa, "seed {seed}");
            assert!(d.stretch_ok);
        }
    }
    assert!(b_ok * 100 >= seeds * 99, "{b_ok}/{seeds}");
}

#[test]
fn low_memory_variant_builds_a_spanner() {
    let cfg = SamplerConfig::new(4, 0.5, 2).unwrap();
    for seed in 0..10 {
        let g = gnp(48, 0.15, seed);
        let run = spanner_construct_low_memory(&g, cfg, &SeededStreams(seed), MAX_ROUNDS).unwrap();
        assert_eq!(run.status, RunStatus::Completed);
        assert_eq!(run.outputs[0].sample_durations.len(), 3);
        assert!(run.diagnostics.clusters_ok());
        if run.diagnostics.event_b_failures == 0 {
            assert!(max_stretch(&g, &run.h_edges) <= 7);
        }
    }
}

#[test]
fn sampled_deltas_follow_the_capped_geometric_law() {
    let cfg = SamplerConfig::new(4, 0.5, 1).unwrap();
    let g = gnp(256, 0.02, 5);
    let trials = 1000;
    let kappa = cfg.kappa as usize;
    let mut counts = vec![0.0f64; kappa];
    let mut expect = vec![0.0f64; kappa];
    let s = cfg.round_success();
    for t in 0..trials {
        let run = sample_deltas(&g, cfg, false, &SeededStreams(t), MAX_ROUNDS).unwrap();
        let dur = run.durations[0];
        let probs: Vec<f64> = (0..cfg.kappa - 1)
            .map(|i| 1.0 - (1.0 - s).powi(draw_rounds(dur, cfg.kappa, i) as i32))
            .collect();
        for (j, e) in expect.iter_mut().enumerate() {
            *e += first_success_pmf(&probs, j) * g.n() as f64;
        }
        for &d in &run.deltas {
            counts[d as usize] += 1.0;
        }
    }
    let total: f64 = counts.iter().sum();
    let tv: f64 = counts
        .iter()
        .zip(&expect)
        .map(|(c, e)| (c / total - e / total).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv <= 0.1, "tv {tv}, counts {counts:?}, expect {expect:?}");
}

#[test]
fn near_max_set_is_small_in_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for &(phi, r) in &[(0.5, 3u32), (0.8, 4), (0.3, 2)] {
        let trials = 4000;
        let n = 50;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..trials {
            let xs: Vec<u32> = (0..n).map(|_| geomcap_sample(phi, r, &mut rng)).collect();
            let offsets: Vec<i64> = (0..n)
                .map(|_| rand::Rng::gen_range(&mut rng, 0..6))
                .collect();
            let c = near_max_count(&xs, &offsets, r) as f64;
            sum += c;
            sq += c * c;
        }
        let mean = sum / trials as f64;
        let sd = ((sq / trials as f64 - mean * mean) / trials as f64).sqrt();
        assert!(
            mean <= 2.0 / (1.0 - phi) + 3.0 * sd,
            "phi {phi}: mean {mean}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fixed_deltas_give_consistent_clusters(
        seed in 0u64..1000,
        kappa in 2u32..5,
        n in 4usize..24,
    ) {
        let cfg = SamplerConfig::new(kappa, 0.5, 2).unwrap();
        let g = gnp(n, 0.3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let deltas: Vec<u32> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0..kappa)).collect();
        let run = spanner_with_deltas(&g, cfg, &deltas, &SeededStreams(seed), MAX_ROUNDS).unwrap();
        let d = &run.diagnostics;
        prop_assert!(d.clusters_ok(), "{:?}", d);
        prop_assert_eq!(d.distance_mismatches, 0);
        prop_assert_eq!(d.r_violations, 0);
        let got: Vec<u32> = run.outputs.iter().map(|o| o.distance).collect();
        prop_assert_eq!(got, virtual_oracle(&g, kappa, &deltas));
    }
}
