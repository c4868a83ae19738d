//! Random circuit-formation cases and a closure computed by brute force.

use rand::Rng;

use crate::engine::{form_circuits, LocalPartition, PinId};
use crate::graph::Graph;

/// A graph with `k` pins per edge and one partition per node.
#[derive(Debug, Clone)]
pub struct ClosureCase {
    pub graph: Graph,
    pub k: usize,
    pub partitions: Vec<LocalPartition>,
}

pub fn random_case<R: Rng + ?Sized>(rng: &mut R, max_n: usize, max_k: usize) -> ClosureCase {
    let n = rng.gen_range(1..=max_n.max(1));
    let k = rng.gen_range(1..=max_k.max(1));
    let p: f64 = rng.gen_range(0.1..0.9);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::from_edges(n, k, &edges).expect("simple by construction");
    let partitions = (0..n)
        .map(|v| {
            let pins = graph.degree(v) * k;
            let parts = rng.gen_range(1..=pins.max(1)) as u32;
            let labels: Vec<u32> = (0..pins).map(|_| rng.gen_range(0..parts)).collect();
            LocalPartition::from_labels(&labels)
        })
        .collect();
    ClosureCase {
        graph,
        k,
        partitions,
    }
}

/// Class labels over flat pins `edge * k + index`, numbered by first
/// appearance, from the reflexive-transitive closure of the binding relation
/// (Warshall over bit rows).
pub fn brute_force_closure(case: &ClosureCase) -> Vec<u32> {
    let (g, k) = (&case.graph, case.k);
    let pins = g.m() * k;
    let words = pins.div_ceil(64);
    let mut reach = vec![vec![0u64; words]; pins];
    let set = |reach: &mut Vec<Vec<u64>>, a: usize, b: usize| reach[a][b / 64] |= 1 << (b % 64);
    for p in 0..pins {
        set(&mut reach, p, p);
    }
    for v in 0..g.n() {
        let labels = case.partitions[v].labels();
        let flat: Vec<usize> = g
            .ports(v)
            .iter()
            .flat_map(|inc| (0..k).map(move |i| inc.edge * k + i))
            .collect();
        for a in 0..flat.len() {
            for b in 0..flat.len() {
                if labels[a] == labels[b] {
                    set(&mut reach, flat[a], flat[b]);
                }
            }
        }
    }
    for mid in 0..pins {
        let row = reach[mid].clone();
        for r in reach.iter_mut() {
            if r[mid / 64] >> (mid % 64) & 1 == 1 {
                for (x, y) in r.iter_mut().zip(&row) {
                    *x |= y;
                }
            }
        }
    }
    let mut out = vec![u32::MAX; pins];
    let mut next = 0;
    for p in 0..pins {
        if out[p] != u32::MAX {
            continue;
        }
        for q in 0..pins {
            if reach[p][q / 64] >> (q % 64) & 1 == 1 {
                out[q] = next;
            }
        }
        next += 1;
    }
    out
}

/// Whether the engine's circuits equal the brute-force closure.
pub fn closure_agrees(case: &ClosureCase) -> bool {
    let Ok(c) = form_circuits(&case.graph, case.k, &case.partitions) else {
        return false;
    };
    let brute = brute_force_closure(case);
    (0..case.graph.m() * case.k).all(|flat| {
        let pin = PinId {
            edge: flat / case.k,
            index: flat % case.k,
        };
        c.class_of(pin) == brute[flat] as usize
    })
}
