use grc_core::engine::{form_circuits, run_until_halt, RunStatus, SeededStreams, TraceMode};
use grc_core::graph::{generate, oracle, Graph, GraphKind};
use grc_core::primitives::standalone::{
    CountingRuns, Detect, DetectInput, Election, Exchange, Orientation,
};
use grc_core::primitives::{global_circuit_part, GrcProgram, Orient, GLOBAL_PIN};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    generate(GraphKind::GnpConnected { n, p }, None, 3, seed).unwrap()
}

#[test]
fn global_circuit_spans_all_index_pins() {
    for (g, expect) in [
        (generate(GraphKind::Path { n: 3 }, None, 3, 0).unwrap(), 2),
        (
            generate(GraphKind::Complete { n: 4 }, None, 3, 0).unwrap(),
            6,
        ),
        (generate(GraphKind::Path { n: 2 }, None, 3, 0).unwrap(), 1),
    ] {
        let parts: Vec<_> = (0..g.n())
            .map(|v| global_circuit_part(g.degree(v), 3, GLOBAL_PIN))
            .collect();
        let c = form_circuits(&g, 3, &parts).unwrap();
        let classes = c.classes();
        let global: Vec<_> = classes
            .iter()
            .filter(|cl| cl.iter().any(|p| p.index == GLOBAL_PIN))
            .collect();
        assert_eq!(global.len(), 1);
        assert_eq!(global[0].len(), expect);
        assert!(global[0].iter().all(|p| p.index == GLOBAL_PIN));
    }
}

fn check_orientation(g: &Graph, out: &[Vec<Orient>]) {
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let ou = out[u][g.port_of(u, e).unwrap()];
        let ov = out[v][g.port_of(v, e).unwrap()];
        assert!(
            matches!(
                (ou, ov),
                (Orient::Out, Orient::In) | (Orient::In, Orient::Out)
            ),
            "edge {e}: {ou:?} {ov:?}"
        );
    }
}

#[test]
fn orientation_completes_within_logarithmic_phases() {
    let g = gnp(64, 0.1, 11);
    let limit_phases = 4 * 6;
    let mut within = 0;
    let trials = 200;
    for seed in 0..trials {
        let res = run_until_halt(
            &g,
            &GrcProgram(Orientation),
            &vec![(); g.n()],
            &SeededStreams(seed),
            10_000,
            TraceMode::Off,
        )
        .unwrap();
        assert_eq!(res.status, RunStatus::Completed);
        check_orientation(&g, &res.outputs);
        let phases = (res.rounds - 2) / 2;
        if phases <= limit_phases {
            within += 1;
        }
    }
    assert!(within as f64 >= 0.99 * trials as f64);
}

#[test]
fn lone_node_counting_mean_is_two() {
    let g = Graph::new(1, 3);
    let res = run_until_halt(
        &g,
        &GrcProgram(CountingRuns { executions: 4000 }),
        &[()],
        &SeededStreams(5),
        1_000_000,
        TraceMode::Off,
    )
    .unwrap();
    let d = &res.outputs[0];
    assert_eq!(d.len(), 4000);
    let mean = d.iter().map(|&x| x as f64).sum::<f64>() / d.len() as f64;
    assert!((mean - 2.0).abs() < 0.1, "mean {mean}");
}

#[test]
fn counting_durations_agree_across_nodes() {
    let g = gnp(32, 0.2, 1);
    let res = run_until_halt(
        &g,
        &GrcProgram(CountingRuns { executions: 5 }),
        &vec![(); g.n()],
        &SeededStreams(9),
        10_000,
        TraceMode::Off,
    )
    .unwrap();
    assert!(res.outputs.iter().all(|d| d == &res.outputs[0]));
    assert_eq!(res.outputs[0].len(), 5);
}

#[test]
fn single_candidate_always_wins() {
    let g = gnp(16, 0.3, 2);
    for seed in 0..20 {
        let mut inputs = vec![false; 16];
        inputs[seed as usize % 16] = true;
        let res = run_until_halt(
            &g,
            &GrcProgram(Election { c: 2 }),
            &inputs,
            &SeededStreams(seed),
            10_000,
            TraceMode::Off,
        )
        .unwrap();
        assert_eq!(res.outputs, inputs);
    }
}

#[test]
fn election_yields_one_leader() {
    let g = generate(GraphKind::Path { n: 128 }, None, 3, 0).unwrap();
    let trials = 100;
    let mut exact = 0;
    for seed in 0..trials {
        let res = run_until_halt(
            &g,
            &GrcProgram(Election { c: 3 }),
            &[true; 128],
            &SeededStreams(seed),
            10_000,
            TraceMode::Off,
        )
        .unwrap();
        let leaders = res.outputs.iter().filter(|&&b| b).count();
        assert!(leaders >= 1);
        if leaders == 1 {
            exact += 1;
        }
    }
    assert!(exact >= 98, "{exact}/{trials}");
}

fn detect(g: &Graph, mask: &[bool], c: u32, seed: u64) -> Vec<Vec<bool>> {
    let inputs: Vec<DetectInput> = g
        .port_bits(mask)
        .into_iter()
        .map(|cluster| DetectInput {
            cluster,
            participant: true,
        })
        .collect();
    let res = run_until_halt(
        g,
        &GrcProgram(Detect { c }),
        &inputs,
        &SeededStreams(seed),
        100_000,
        TraceMode::Off,
    )
    .unwrap();
    assert_eq!(res.status, RunStatus::Completed);
    res.outputs.into_iter().map(|o| o.outgoing).collect()
}

fn expected_outgoing(g: &Graph, mask: &[bool]) -> Vec<Vec<bool>> {
    let parts = oracle::components(g, &oracle::mask_to_edges(mask));
    (0..g.n())
        .map(|v| {
            g.ports(v)
                .iter()
                .map(|inc| parts.is_outgoing(g, inc.edge))
                .collect()
        })
        .collect()
}

#[test]
fn detection_on_extreme_subgraphs() {
    let g = gnp(20, 0.25, 4);
    let all = vec![true; g.m()];
    let none = vec![false; g.m()];
    for seed in 0..5 {
        assert_eq!(detect(&g, &all, 3, seed), expected_outgoing(&g, &all));
        assert_eq!(detect(&g, &none, 3, seed), expected_outgoing(&g, &none));
    }
}

#[test]
fn detection_finds_the_bridge() {
    let g = Graph::from_edges(
        6,
        3,
        &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
    )
    .unwrap();
    let mut mask = vec![true; 7];
    mask[6] = false;
    let out = detect(&g, &mask, 3, 1);
    assert_eq!(out, expected_outgoing(&g, &mask));
    assert_eq!(out[2], vec![false, false, true]);
}

#[test]
fn detection_error_rate_is_small() {
    let g = gnp(64, 0.1, 3);
    let trials = 60;
    let mut wrong = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seed in 0..trials {
        let mask: Vec<bool> = (0..g.m()).map(|_| rng.gen_bool(0.6)).collect();
        if detect(&g, &mask, 3, seed) != expected_outgoing(&g, &mask) {
            wrong += 1;
        }
    }
    assert!(wrong <= 1, "{wrong} wrong runs");
}

#[test]
fn nodes_stay_in_lockstep() {
    let g = gnp(12, 0.3, 6);
    let mask: Vec<bool> = (0..g.m()).map(|e| e % 2 == 0).collect();
    let inputs: Vec<DetectInput> = g
        .port_bits(&mask)
        .into_iter()
        .map(|cluster| DetectInput {
            cluster,
            participant: true,
        })
        .collect();
    let res = run_until_halt(
        &g,
        &GrcProgram(Detect { c: 2 }),
        &inputs,
        &SeededStreams(3),
        100_000,
        TraceMode::Full,
    )
    .unwrap();
    let trace = res.trace.unwrap();
    for r in &trace.rounds {
        let tag = |s: &str| s.split(" DetectProc").next().unwrap().to_string();
        let first = tag(&r.nodes[0].state);
        assert!(
            r.nodes.iter().all(|n| tag(&n.state) == first),
            "round {}",
            r.round
        );
    }
}

fn random_messages(g: &Graph, seed: u64) -> Vec<Vec<Option<bool>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..g.n())
        .map(|v| {
            (0..g.degree(v))
                .map(|_| match rng.gen_range(0..3) {
                    0 => None,
                    1 => Some(false),
                    _ => Some(true),
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exchange_is_lossless(n in 2usize..14, p in 0.2f64..0.9, gseed in 0u64..1000, seed in 0u64..1000) {
        let g = gnp(n, p, gseed);
        let sent = random_messages(&g, seed);
        let res = run_until_halt(&g, &GrcProgram(Exchange), &sent, &SeededStreams(seed), 100_000, TraceMode::Off).unwrap();
        prop_assert_eq!(res.status, RunStatus::Completed);
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let pu = g.port_of(u, e).unwrap();
            let pv = g.port_of(v, e).unwrap();
            prop_assert_eq!(res.outputs[v][pv], sent[u][pu]);
            prop_assert_eq!(res.outputs[u][pu], sent[v][pv]);
        }
    }
}

#[test]
fn opposite_sends_share_one_frame() {
    let g = Graph::from_edges(2, 3, &[(0, 1)]).unwrap();
    let sent = vec![vec![Some(false)], vec![Some(true)]];
    let res = run_until_halt(
        &g,
        &GrcProgram(Exchange),
        &sent,
        &SeededStreams(0),
        1000,
        TraceMode::Off,
    )
    .unwrap();
    assert_eq!(res.outputs, vec![vec![Some(true)], vec![Some(false)]]);
}
