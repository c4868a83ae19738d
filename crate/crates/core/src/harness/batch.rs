use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cutsim::{verify_round_equivalence, CutInstance};
use crate::engine::{run_until_halt, RunStatus, SeededStreams, TraceMode};
use crate::graph::{generate, load_graph, oracle, Graph, GraphError};
use crate::mst::{mst_construct, mst_inputs, Mst};
use crate::primitives::standalone::CountingRuns;
use crate::primitives::{median_of, GrcProgram};
use crate::spanner::geomcap::{geomcap_sample, near_max_count};
use crate::spanner::{spanner_construct, spanner_construct_low_memory, SamplerConfig, Spanner};
use crate::verification::{instance_pair, oracle_answer, verify};

use super::closure::{closure_agrees, random_case};
use super::config::{Algorithm, CutProgram, ExperimentConfig, GraphSource};
use super::{HarnessError, CSV_VERSION, SUMMARY_VERSION};

/// Pins per edge for every generated graph.
const K: usize = 3;

/// One CSV row; the column set is fixed for a given [`CSV_VERSION`].
///
/// `value` and `reference` depend on the algorithm:
/// mst phases / Kruskal weight, spanner max stretch / size bound,
/// counting median duration / `log2 n`, geomcap near-max set size /
/// `2 / (1 - phi)`, cutsim max bits per round / bit bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub version: u32,
    pub experiment: String,
    pub algorithm: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub status: String,
    pub rounds: u64,
    pub output_size: Option<usize>,
    pub output_weight: Option<u64>,
    pub decision: Option<bool>,
    pub expected: Option<bool>,
    pub oracle_ok: bool,
    /// Failure flags separated by `;`.
    pub flags: String,
    pub value: Option<f64>,
    pub reference: Option<f64>,
}

impl RunRow {
    fn new(cfg: &ExperimentConfig, n: usize, m: usize, seed: u64) -> Self {
        RunRow {
            version: CSV_VERSION,
            experiment: cfg.name.clone(),
            algorithm: cfg.algorithm.label().to_string(),
            n,
            m,
            seed,
            status: "completed".to_string(),
            rounds: 0,
            output_size: None,
            output_weight: None,
            decision: None,
            expected: None,
            oracle_ok: false,
            flags: String::new(),
            value: None,
            reference: None,
        }
    }

    fn set_status(&mut self, status: RunStatus) {
        if status == RunStatus::Timeout {
            self.status = "timeout".to_string();
            self.flag("timeout");
        }
    }

    fn flag(&mut self, f: &str) {
        if !self.flags.is_empty() {
            self.flags.push(';');
        }
        self.flags.push_str(f);
    }

    fn flag_if(&mut self, cond: bool, f: &str) {
        if cond {
            self.flag(f);
        }
    }

    pub fn completed(&self) -> bool {
        self.status == "completed"
    }

    pub fn flag_list(&self) -> impl Iterator<Item = &str> {
        self.flags.split(';').filter(|f| !f.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub runs: usize,
    pub mean_rounds: f64,
    pub success_rate: f64,
    pub mean_output_size: Option<f64>,
    pub mean_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub version: u32,
    pub experiment: String,
    pub algorithm: String,
    pub runs: usize,
    pub completed: usize,
    pub timeouts: usize,
    /// Fraction of rows with `oracle_ok`.
    pub success_rate: f64,
    pub flags: BTreeMap<String, usize>,
    pub per_n: Vec<SizeSummary>,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (c > 0).then(|| s / c as f64)
}

impl Summary {
    /// Recomputes every aggregate from the rows.
    pub fn from_rows(cfg: &ExperimentConfig, rows: &[RunRow]) -> Self {
        let mut flags = BTreeMap::new();
        for r in rows {
            for f in r.flag_list() {
                *flags.entry(f.to_string()).or_insert(0) += 1;
            }
        }
        let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let per_n = sizes
            .into_iter()
            .map(|n| {
                let group: Vec<&RunRow> = rows.iter().filter(|r| r.n == n).collect();
                SizeSummary {
                    n,
                    runs: group.len(),
                    mean_rounds: mean(group.iter().map(|r| r.rounds as f64)).unwrap_or(0.0),
                    success_rate: mean(group.iter().map(|r| r.oracle_ok as u8 as f64))
                        .unwrap_or(0.0),
                    mean_output_size: mean(
                        group.iter().filter_map(|r| r.output_size).map(|x| x as f64),
                    ),
                    mean_value: mean(group.iter().filter_map(|r| r.value)),
                }
            })
            .collect();
        let completed = rows.iter().filter(|r| r.completed()).count();
        Summary {
            version: SUMMARY_VERSION,
            experiment: cfg.name.clone(),
            algorithm: cfg.algorithm.label().to_string(),
            runs: rows.len(),
            completed,
            timeouts: rows.len() - completed,
            success_rate: mean(rows.iter().map(|r| r.oracle_ok as u8 as f64)).unwrap_or(0.0),
            flags,
            per_n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<RunRow>,
    pub summary: Summary,
}

impl ExperimentResult {
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        rows_to_csv(&self.rows)
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).unwrap_or_default()
    }
}

pub fn rows_to_csv(rows: &[RunRow]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| HarnessError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).unwrap_or_default())
}

pub fn rows_from_csv(text: &str) -> Result<Vec<RunRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| row.map_err(HarnessError::from))
        .collect()
}

/// Derives a graph seed from a run seed and size, so that graphs and node
/// streams do not share a generator.
fn graph_seed(seed: u64, n: usize) -> u64 {
    let mut z = seed ^ (n as u64).rotate_left(32) ^ 0x9e37_79b9_7f4a_7c15;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

enum Graphs {
    None,
    File(Graph),
    Family(GraphSource),
}

impl Graphs {
    fn load(src: Option<&GraphSource>) -> Result<Self, HarnessError> {
        Ok(match src {
            None => Graphs::None,
            Some(GraphSource::File { path }) => {
                let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                    path: path.clone(),
                    source,
                })?;
                Graphs::File(load_graph(&text)?.with_pins(K))
            }
            Some(s @ GraphSource::Family { .. }) => Graphs::Family(s.clone()),
        })
    }

    fn sizes(&self) -> Vec<usize> {
        match self {
            Graphs::None => Vec::new(),
            Graphs::File(g) => vec![g.n()],
            Graphs::Family(GraphSource::Family { sizes, .. }) => sizes.clone(),
            Graphs::Family(_) => Vec::new(),
        }
    }

    fn get(&self, n: usize, seed: u64) -> Result<Graph, HarnessError> {
        match self {
            Graphs::None => Err(HarnessError::Missing("graph")),
            Graphs::File(g) => Ok(g.clone()),
            Graphs::Family(GraphSource::Family {
                family, weights, ..
            }) => Ok(generate(family.kind(n), *weights, K, graph_seed(seed, n))?),
            Graphs::Family(_) => Err(HarnessError::Missing("graph")),
        }
    }
}

/// Runs every (size, seed) of the batch. Rows come back sorted by seed,
/// then size; timeouts are marked in their rows.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    let mut seeds = cfg.seeds.expand();
    if seeds.is_empty() {
        return Err(HarnessError::NoSeeds);
    }
    seeds.sort_unstable();
    seeds.dedup();
    let graphs = Graphs::load(cfg.graph.as_ref())?;
    let sizes = match &cfg.algorithm {
        Algorithm::Verify { sizes, .. } => sizes.clone(),
        Algorithm::Geomcap { n, .. } => vec![*n],
        Algorithm::Closure { .. } => vec![0],
        _ => graphs.sizes(),
    };
    if sizes.is_empty() {
        return Err(HarnessError::Missing("graph"));
    }
    let mut rows = Vec::with_capacity(seeds.len() * sizes.len());
    for &seed in &seeds {
        for &n in &sizes {
            rows.push(run_one(cfg, &graphs, n, seed)?);
        }
    }
    let summary = Summary::from_rows(cfg, &rows);
    Ok(ExperimentResult { rows, summary })
}

fn run_one(
    cfg: &ExperimentConfig,
    graphs: &Graphs,
    n: usize,
    seed: u64,
) -> Result<RunRow, HarnessError> {
    let src = SeededStreams(seed);
    let max = cfg.max_rounds;
    match &cfg.algorithm {
        Algorithm::Mst { c } => {
            let g = graphs.get(n, seed)?;
            let mut row = RunRow::new(cfg, g.n(), g.m(), seed);
            let run = mst_construct(&g, *c, &src, max)?;
            let (best, _) = oracle::oracle_mst(&g)?;
            row.set_status(run.status);
            row.rounds = run.rounds;
            row.output_size = Some(run.tree_edges.len());
            row.output_weight = Some(run.weight);
            row.value = Some(run.phases as f64);
            row.reference = Some(best as f64);
            let d = &run.diagnostics;
            row.oracle_ok =
                run.status == RunStatus::Completed && run.weight == best && d.is_spanning_tree;
            row.flag_if(!d.is_spanning_tree, "not-spanning");
            row.flag_if(d.bit_collisions > 0, "bit-collision");
            row.flag_if(d.multi_selections > 0, "multi-selection");
            row.flag_if(d.detection_errors > 0, "whp-miss");
            row.flag_if(d.halving_violations > 0, "no-halving");
            Ok(row)
        }
        Algorithm::Spanner {
            kappa,
            eps,
            c,
            low_memory,
        } => {
            let g = graphs.get(n, seed)?;
            let mut row = RunRow::new(cfg, g.n(), g.m(), seed);
            let sc = SamplerConfig::new(*kappa, *eps, *c)?;
            let run = if *low_memory {
                spanner_construct_low_memory(&g, sc, &src, max)?
            } else {
                spanner_construct(&g, sc, &src, max)?
            };
            let d = &run.diagnostics;
            row.set_status(run.status);
            row.rounds = run.rounds;
            row.output_size = Some(run.h_edges.len());
            row.value = d.max_stretch.map(f64::from);
            row.reference = Some(d.size_bound);
            row.oracle_ok = run.status == RunStatus::Completed && d.stretch_ok;
            row.flag_if(!d.stretch_ok, "stretch");
            row.flag_if(d.event_b_failures > 0, "b-collision");
            row.flag_if(d.r_violations > 0, "r-violation");
            row.flag_if(!d.clusters_ok(), "clusters");
            row.flag_if(d.distance_mismatches > 0, "distance");
            Ok(row)
        }
        Algorithm::Verify { task, c, .. } => {
            let yes = seed.is_multiple_of(2);
            let pair = instance_pair(*task, n, seed)?;
            let g = pair.get(yes);
            let mut row = RunRow::new(cfg, g.n(), g.m(), seed);
            let run = verify(*task, g, *c, &src, max)?;
            row.set_status(run.status);
            row.rounds = run.rounds;
            row.decision = run.decision;
            row.expected = Some(yes);
            row.output_size = g.subgraph().map(|h| h.iter().filter(|&&b| b).count());
            row.oracle_ok = run.unanimous && run.decision == Some(yes);
            row.flag_if(!run.unanimous, "split-decision");
            row.flag_if(oracle_answer(*task, g)? != yes, "instance");
            Ok(row)
        }
        Algorithm::Counting { r, rho } => {
            let g = graphs.get(n, seed)?;
            let mut row = RunRow::new(cfg, g.n(), g.m(), seed);
            if *r == 0 {
                return Err(HarnessError::Param("r must be positive".into()));
            }
            let res = run_until_halt(
                &g,
                &GrcProgram(CountingRuns {
                    executions: 2 * r - 1,
                }),
                &vec![(); g.n()],
                &src,
                max,
                TraceMode::Off,
            )?;
            row.set_status(res.status);
            row.rounds = res.rounds;
            let tau = median_of(&res.outputs[0], *r as usize);
            let log = (g.n() as f64).log2();
            row.value = tau.map(f64::from);
            row.reference = Some(log);
            let inside = tau.is_some_and(|t| {
                let t = t as f64;
                (1.0 - rho) * log <= t && t <= (1.0 + rho) * log
            });
            row.oracle_ok = inside;
            row.flag_if(!inside, "outside-window");
            row.flag_if(res.outputs.iter().any(|d| d != &res.outputs[0]), "disagree");
            Ok(row)
        }
        Algorithm::Geomcap {
            phi,
            kappa,
            n: count,
        } => {
            if !(*phi > 0.0 && *phi < 1.0) || *kappa < 2 {
                return Err(HarnessError::Param(
                    "need 0 < phi < 1 and kappa >= 2".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cap = kappa - 1;
            let xs: Vec<u32> = (0..*count)
                .map(|_| geomcap_sample(*phi, cap, &mut rng))
                .collect();
            let offsets: Vec<i64> = (0..*count)
                .map(|_| rng.gen_range(0..*kappa as i64))
                .collect();
            let mut row = RunRow::new(cfg, *count, 0, seed);
            let size = near_max_count(&xs, &offsets, cap);
            row.output_size = Some(size);
            row.value = Some(size as f64);
            row.reference = Some(2.0 / (1.0 - phi));
            row.oracle_ok = true;
            Ok(row)
        }
        Algorithm::Closure { max_n, max_k } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let case = random_case(&mut rng, *max_n, *max_k);
            let mut row = RunRow::new(cfg, case.graph.n(), case.graph.m(), seed);
            row.oracle_ok = closure_agrees(&case);
            row.value = Some(case.k as f64);
            row.flag_if(!row.oracle_ok, "mismatch");
            Ok(row)
        }
        Algorithm::Cutsim { program, rounds } => {
            let g = graphs.get(n, seed)?;
            let mut row = RunRow::new(cfg, g.n(), g.m(), seed);
            let inst = CutInstance::random_balanced(&g, K, seed)?;
            let report = match *program {
                CutProgram::Mst { c } => {
                    let w = g.weights().ok_or(GraphError::Unweighted)?;
                    verify_round_equivalence(
                        &g,
                        &GrcProgram(Mst { c }),
                        &mst_inputs(&g, w),
                        &src,
                        &inst,
                        *rounds,
                    )?
                }
                CutProgram::Spanner { kappa, eps, c } => verify_round_equivalence(
                    &g,
                    &GrcProgram(Spanner {
                        cfg: SamplerConfig::new(kappa, eps, c)?,
                        low_memory: false,
                    }),
                    &vec![None; g.n()],
                    &src,
                    &inst,
                    *rounds,
                )?,
            };
            row.rounds = report.rounds.len() as u64;
            row.output_size = Some(report.mismatches.len());
            row.output_weight = Some(report.cut_pins as u64);
            row.value = Some(report.max_bits() as f64);
            row.reference = Some(report.bound_per_round as f64);
            row.oracle_ok = report.exact() && report.within_bound();
            row.flag_if(!report.exact(), "mismatch");
            row.flag_if(!report.within_bound(), "over-bound");
            Ok(row)
        }
    }
}
