//! Minimum spanning tree construction in Boruvka-style phases.

mod lightest;
mod order;
mod procedure;
mod selection;

pub use lightest::Lightest;
pub use order::{prec_compare, CandidateTag};
pub use procedure::{Mst, MstMachine, MstOutput, MstProc, Selected};
pub use selection::Selection;

use std::collections::HashMap;

use thiserror::Error;

use crate::engine::{run_until_halt, EngineError, RandomSource, RunStatus, TraceMode};
use crate::graph::{oracle, Graph, GraphError};
use crate::primitives::GrcProgram;

#[derive(Debug, Error)]
pub enum MstError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Post-hoc checks of one MST run against the graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MstDiagnostics {
    /// Edges marked by only one endpoint.
    pub asymmetric_edges: usize,
    pub is_spanning_tree: bool,
    pub has_cycle: bool,
    /// Clusters that selected more than one edge in a phase.
    pub multi_selections: usize,
    /// Clusters whose selected edges had identical selection bits.
    pub bit_collisions: usize,
    /// Phases whose detected outgoing edges disagree with the clusters.
    pub detection_errors: usize,
    /// Phases after which the cluster count did not at least halve.
    pub halving_violations: usize,
    /// Cluster count at the start of every phase.
    pub clusters_per_phase: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MstRun {
    pub tree_edges: Vec<usize>,
    pub weight: u64,
    pub rounds: u64,
    pub status: RunStatus,
    pub phases: u32,
    pub diagnostics: MstDiagnostics,
}

pub fn mst_inputs(graph: &Graph, weights: &[u64]) -> Vec<Vec<u64>> {
    graph.port_values(weights)
}

/// Runs the MST program under `graph`'s weights.
pub fn mst_construct(
    graph: &Graph,
    c: u32,
    source: &dyn RandomSource,
    max_rounds: u64,
) -> Result<MstRun, MstError> {
    let weights = graph.weights().ok_or(GraphError::Unweighted)?;
    let inputs = mst_inputs(graph, weights);
    let res = run_until_halt(
        graph,
        &GrcProgram(Mst { c }),
        &inputs,
        source,
        max_rounds,
        TraceMode::Off,
    )?;
    let diagnostics = analyze(graph, &res.outputs);
    let tree_edges = tree_edges(graph, &res.outputs);
    let weight = tree_edges.iter().map(|&e| weights[e]).sum();
    Ok(MstRun {
        tree_edges,
        weight,
        rounds: res.rounds,
        status: res.status,
        phases: res.outputs.iter().map(|o| o.phases).max().unwrap_or(0),
        diagnostics,
    })
}

/// Edges marked as tree edges by at least one endpoint, sorted.
pub fn tree_edges(graph: &Graph, outputs: &[MstOutput]) -> Vec<usize> {
    let mut edges: Vec<usize> = (0..graph.n())
        .flat_map(|v| {
            graph
                .ports(v)
                .iter()
                .zip(&outputs[v].tree_ports)
                .filter(|(_, &t)| t)
                .map(|(inc, _)| inc.edge)
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

pub fn analyze(graph: &Graph, outputs: &[MstOutput]) -> MstDiagnostics {
    let mut d = MstDiagnostics::default();
    let n = graph.n();
    let mut added: Vec<Option<u32>> = vec![None; graph.m()];
    let mut marks = vec![0u8; graph.m()];
    for v in 0..n {
        for (port, inc) in graph.ports(v).iter().enumerate() {
            if outputs[v].tree_ports[port] {
                marks[inc.edge] += 1;
                let ph = outputs[v].added_in_phase[port];
                added[inc.edge] = match (added[inc.edge], ph) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
            }
        }
    }
    d.asymmetric_edges = marks.iter().filter(|&&m| m == 1).count();
    let tree = tree_edges(graph, outputs);
    let parts = oracle::components(graph, &tree);
    d.has_cycle = tree.len() + parts.count > n;
    d.is_spanning_tree = parts.count == 1 && tree.len() + 1 == n;

    let phases = outputs
        .iter()
        .map(|o| o.out_history.len())
        .max()
        .unwrap_or(0);
    for i in 0..phases {
        let before: Vec<usize> = (0..graph.m())
            .filter(|&e| matches!(added[e], Some(p) if (p as usize) < i))
            .collect();
        let clusters = oracle::components(graph, &before);
        d.clusters_per_phase.push(clusters.count);

        let mut wrong = false;
        for v in 0..n {
            let Some(out) = outputs[v].out_history.get(i) else {
                wrong = true;
                continue;
            };
            for (port, inc) in graph.ports(v).iter().enumerate() {
                if out[port] != clusters.is_outgoing(graph, inc.edge) {
                    wrong = true;
                }
            }
        }
        if wrong {
            d.detection_errors += 1;
        }

        let mut per_cluster: HashMap<usize, Vec<&Selected>> = HashMap::new();
        for (v, o) in outputs.iter().enumerate() {
            for s in o.selections.iter().filter(|s| s.phase as usize == i) {
                per_cluster
                    .entry(clusters.cluster_of[v])
                    .or_default()
                    .push(s);
            }
        }
        for sel in per_cluster.values() {
            if sel.len() > 1 {
                d.multi_selections += 1;
                if sel
                    .windows(2)
                    .any(|w| w[0].bits == w[1].bits && w[0].weight == w[1].weight)
                {
                    d.bit_collisions += 1;
                }
            }
        }
    }
    for w in d.clusters_per_phase.windows(2) {
        if w[0] > 1 && w[1] * 2 > w[0] {
            d.halving_violations += 1;
        }
    }
    d
}
