//! Sparse `(2 kappa - 1)`-spanners: random shifts sampled on the global
//! circuit, clusters grown from a virtual root, and bridging edges chosen by
//! random cluster IDs.

mod bridging;
mod clusters;
pub mod geomcap;
mod procedure;
mod sampler;

pub use bridging::{Bridging, PortClass};
pub use clusters::ClusterBfs;
pub use procedure::{
    DeltaSampler, DeltaSampling, DeltaSamplingProc, Spanner, SpannerMachine, SpannerOutput,
    SpannerProc,
};
pub use sampler::{delta_from_bits, draw_rounds, Sampler, SamplerConfig, SamplerError};

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::engine::{run_until_halt, EngineError, RandomSource, RunStatus, TraceMode};
use crate::graph::{oracle, Graph};
use crate::primitives::GrcProgram;

#[derive(Debug, Error)]
pub enum SpannerError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("expected {expected} fixed deltas, got {got}")]
    DeltaCount { expected: usize, got: usize },
}

#[derive(Debug, Clone)]
pub struct DeltaRun {
    pub deltas: Vec<u32>,
    /// Median execution length per sampler run, as seen by node 0.
    pub durations: Vec<u32>,
    pub rounds: u64,
    pub status: RunStatus,
}

/// Runs only the sampling stage.
pub fn sample_deltas(
    graph: &Graph,
    cfg: SamplerConfig,
    low_memory: bool,
    source: &dyn RandomSource,
    max_rounds: u64,
) -> Result<DeltaRun, SpannerError> {
    let inputs = vec![(); graph.n()];
    let res = run_until_halt(
        graph,
        &GrcProgram(DeltaSampling { cfg, low_memory }),
        &inputs,
        source,
        max_rounds,
        TraceMode::Off,
    )?;
    Ok(DeltaRun {
        deltas: res.outputs.iter().map(|o| o.0).collect(),
        durations: res.outputs.first().map(|o| o.1.clone()).unwrap_or_default(),
        rounds: res.rounds,
        status: res.status,
    })
}

/// Post-hoc checks of one spanner run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpannerDiagnostics {
    pub size: usize,
    /// `2 n^{1+(1+eps)/kappa} + n^{1+1/kappa} + 1`.
    pub size_bound: f64,
    /// Largest `d_H(u, v)` over edges `(u, v)`; `None` if some edge's
    /// endpoints are disconnected in `H`.
    pub max_stretch: Option<u32>,
    pub stretch_ok: bool,
    /// Inter-cluster non-tree edges where neither endpoint has exactly one
    /// `H` edge into the other's cluster.
    pub event_b_failures: usize,
    /// Bridging edges whose centers fail the `R(v)` membership check.
    pub r_violations: usize,
    /// Clusters without exactly one center.
    pub bad_clusters: usize,
    /// Nodes whose parent chain does not reach a center within `kappa - 1` hops.
    pub broken_chains: usize,
    /// Tree edges marked by only one endpoint.
    pub asymmetric_tree_edges: usize,
    pub max_level: u32,
    /// Nodes whose virtual-root distance disagrees with the shortest path.
    pub distance_mismatches: usize,
}

impl SpannerDiagnostics {
    pub fn clusters_ok(&self) -> bool {
        self.bad_clusters == 0 && self.broken_chains == 0 && self.asymmetric_tree_edges == 0
    }
}

#[derive(Debug, Clone)]
pub struct SpannerRun {
    pub h_edges: Vec<usize>,
    pub tree_edges: Vec<usize>,
    pub deltas: Vec<u32>,
    pub centers: Vec<bool>,
    /// Center of each node's cluster, following parent pointers.
    pub cluster_of: Vec<Option<usize>>,
    pub levels: Vec<Option<u32>>,
    pub rounds: u64,
    pub status: RunStatus,
    pub diagnostics: SpannerDiagnostics,
    pub outputs: Vec<SpannerOutput>,
}

pub fn spanner_construct(
    graph: &Graph,
    cfg: SamplerConfig,
    source: &dyn RandomSource,
    max_rounds: u64,
) -> Result<SpannerRun, SpannerError> {
    run_spanner(graph, cfg, false, None, source, max_rounds)
}

/// Samples one experiment at a time.
pub fn spanner_construct_low_memory(
    graph: &Graph,
    cfg: SamplerConfig,
    source: &dyn RandomSource,
    max_rounds: u64,
) -> Result<SpannerRun, SpannerError> {
    run_spanner(graph, cfg, true, None, source, max_rounds)
}

/// Skips sampling and uses the given `delta_v`.
pub fn spanner_with_deltas(
    graph: &Graph,
    cfg: SamplerConfig,
    deltas: &[u32],
    source: &dyn RandomSource,
    max_rounds: u64,
) -> Result<SpannerRun, SpannerError> {
    run_spanner(graph, cfg, false, Some(deltas), source, max_rounds)
}

fn run_spanner(
    graph: &Graph,
    cfg: SamplerConfig,
    low_memory: bool,
    deltas: Option<&[u32]>,
    source: &dyn RandomSource,
    max_rounds: u64,
) -> Result<SpannerRun, SpannerError> {
    let inputs: Vec<Option<u32>> = match deltas {
        Some(d) if d.len() != graph.n() => {
            return Err(SpannerError::DeltaCount {
                expected: graph.n(),
                got: d.len(),
            })
        }
        Some(d) => d.iter().map(|&x| Some(x)).collect(),
        None => vec![None; graph.n()],
    };
    let res = run_until_halt(
        graph,
        &GrcProgram(Spanner { cfg, low_memory }),
        &inputs,
        source,
        max_rounds,
        TraceMode::Off,
    )?;
    let outputs = res.outputs;
    let (cluster_of, levels) = follow_parents(graph, &outputs, cfg.kappa);
    let diagnostics = analyze(graph, cfg, &outputs);
    Ok(SpannerRun {
        h_edges: marked_edges(graph, &outputs, |o| &o.h_ports),
        tree_edges: marked_edges(graph, &outputs, |o| &o.tree_ports),
        deltas: outputs.iter().map(|o| o.delta).collect(),
        centers: outputs.iter().map(|o| o.center).collect(),
        cluster_of,
        levels,
        rounds: res.rounds,
        status: res.status,
        diagnostics,
        outputs,
    })
}

/// Edges marked by at least one endpoint, sorted.
pub fn marked_edges(
    graph: &Graph,
    outputs: &[SpannerOutput],
    mask: impl Fn(&SpannerOutput) -> &Vec<bool>,
) -> Vec<usize> {
    let mut edges: Vec<usize> = (0..graph.n())
        .flat_map(|v| {
            graph
                .ports(v)
                .iter()
                .zip(mask(&outputs[v]))
                .filter(|(_, &b)| b)
                .map(|(inc, _)| inc.edge)
                .collect::<Vec<_>>()
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

fn follow_parents(
    graph: &Graph,
    outputs: &[SpannerOutput],
    kappa: u32,
) -> (Vec<Option<usize>>, Vec<Option<u32>>) {
    let n = graph.n();
    let mut cluster_of = vec![None; n];
    let mut levels = vec![None; n];
    for v in 0..n {
        let mut x = v;
        for hops in 0..kappa {
            let o = &outputs[x];
            if o.center {
                cluster_of[v] = Some(x);
                levels[v] = Some(hops);
                break;
            }
            match o.parent {
                Some(p) => x = graph.ports(x)[p].neighbor,
                None => break,
            }
        }
    }
    (cluster_of, levels)
}

pub fn size_bound(n: usize, kappa: u32, eps: f64) -> f64 {
    let n = n as f64;
    let k = kappa as f64;
    2.0 * n.powf(1.0 + (1.0 + eps) / k) + n.powf(1.0 + 1.0 / k) + 1.0
}

/// `min_x (kappa - delta_x + d(x, v))`, by Dijkstra from a virtual root.
pub fn virtual_distances(graph: &Graph, kappa: u32, deltas: &[u32]) -> Vec<u32> {
    let n = graph.n();
    let mut dist = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    for (v, &d) in deltas.iter().enumerate() {
        let w = kappa - d.min(kappa - 1);
        if w < dist[v] {
            dist[v] = w;
            heap.push(Reverse((w, v)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for inc in graph.ports(v) {
            if d + 1 < dist[inc.neighbor] {
                dist[inc.neighbor] = d + 1;
                heap.push(Reverse((d + 1, inc.neighbor)));
            }
        }
    }
    dist
}

pub fn analyze(graph: &Graph, cfg: SamplerConfig, outputs: &[SpannerOutput]) -> SpannerDiagnostics {
    let n = graph.n();
    let kappa = cfg.kappa;
    let mut d = SpannerDiagnostics {
        size_bound: size_bound(n, kappa, cfg.eps),
        ..SpannerDiagnostics::default()
    };
    let h = marked_edges(graph, outputs, |o| &o.h_ports);
    let tree = marked_edges(graph, outputs, |o| &o.tree_ports);
    d.size = h.len();

    for v in 0..n {
        for (port, inc) in graph.ports(v).iter().enumerate() {
            let u = inc.neighbor;
            if v < u {
                let back = graph.port_of(u, inc.edge).expect("incidence is symmetric");
                if outputs[v].tree_ports[port] != outputs[u].tree_ports[back] {
                    d.asymmetric_tree_edges += 1;
                }
            }
        }
    }

    let (cluster_of, levels) = follow_parents(graph, outputs, kappa);
    d.broken_chains = cluster_of.iter().filter(|c| c.is_none()).count();
    d.max_level = levels.iter().flatten().copied().max().unwrap_or(0);
    let comps = oracle::components(graph, &tree);
    let mut centers = vec![0usize; comps.count];
    for v in 0..n {
        if outputs[v].center {
            centers[comps.cluster_of[v]] += 1;
        }
    }
    d.bad_clusters = centers.iter().filter(|&&c| c != 1).count();

    let deltas: Vec<u32> = outputs.iter().map(|o| o.delta).collect();
    let vd = virtual_distances(graph, kappa, &deltas);
    d.distance_mismatches = (0..n).filter(|&v| outputs[v].distance != vd[v]).count();

    // d_H over every edge of G.
    let limit = 2 * kappa - 1;
    let mut max_stretch = Some(0);
    for v in 0..n {
        let dist = oracle::distances_from(graph, &h, v);
        for inc in graph.ports(v) {
            let x = dist[inc.neighbor];
            max_stretch = match (max_stretch, x) {
                (_, oracle::UNREACHABLE) | (None, _) => None,
                (Some(m), x) => Some(m.max(x)),
            };
        }
    }
    d.max_stretch = max_stretch;
    d.stretch_ok = max_stretch.is_some_and(|m| m <= limit);

    // Event B on edges between different clusters.
    let mut in_h = vec![false; graph.m()];
    for &e in &h {
        in_h[e] = true;
    }
    let mut into_cluster: HashMap<(usize, usize), usize> = HashMap::new();
    for &e in &h {
        let (a, b) = graph.endpoints(e);
        if let (Some(ca), Some(cb)) = (cluster_of[a], cluster_of[b]) {
            *into_cluster.entry((a, cb)).or_default() += 1;
            *into_cluster.entry((b, ca)).or_default() += 1;
        }
    }
    let is_tree: Vec<bool> = {
        let mut t = vec![false; graph.m()];
        for &e in &tree {
            t[e] = true;
        }
        t
    };
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        if is_tree[e] {
            continue;
        }
        let (Some(cu), Some(cv)) = (cluster_of[u], cluster_of[v]) else {
            d.event_b_failures += 1;
            continue;
        };
        if cu == cv {
            continue;
        }
        let one = |x: usize, c: usize| into_cluster.get(&(x, c)).copied() == Some(1);
        if !one(u, cv) && !one(v, cu) {
            d.event_b_failures += 1;
        }
    }

    // R(v) membership for bridging edges.
    let bridges = marked_edges(graph, outputs, |o| &o.bridge_ports);
    if !bridges.is_empty() {
        let all = (0..graph.m()).collect::<Vec<_>>();
        let apsp = oracle::oracle_distances(graph, &all);
        let shifted = |x: usize, v: usize| deltas[x] as i64 - apsp[x][v] as i64;
        let m: Vec<i64> = (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&x| apsp[x][v] != oracle::UNREACHABLE)
                    .map(|x| shifted(x, v))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let in_r = |x: usize, v: usize| {
            apsp[x][v] != oracle::UNREACHABLE && {
                let s = shifted(x, v);
                m[v] - 1 <= s && s <= m[v]
            }
        };
        for &e in &bridges {
            let (u, v) = graph.endpoints(e);
            let ok = match (cluster_of[u], cluster_of[v]) {
                (Some(cu), Some(cv)) => in_r(cu, v) || in_r(cv, u),
                _ => false,
            };
            if !ok {
                d.r_violations += 1;
            }
        }
    }
    d
}
