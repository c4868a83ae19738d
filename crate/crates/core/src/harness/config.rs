use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphKind, WeightMode};
use crate::verification::Task;

use super::HarnessError;

pub const DEFAULT_MAX_ROUNDS: u64 = 5_000_000;

/// One batch: an algorithm, where graphs come from, and which seeds to run.
/// Every row is a function of the config and its seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub graph: Option<GraphSource>,
    pub seeds: Seeds,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u64,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_max_rounds() -> u64 {
    DEFAULT_MAX_ROUNDS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Algorithm {
    Mst {
        c: u32,
    },
    Spanner {
        kappa: u32,
        eps: f64,
        c: u32,
        #[serde(default)]
        low_memory: bool,
    },
    /// Balanced yes/no instances: even seeds get the yes instance.
    Verify {
        task: Task,
        c: u32,
        sizes: Vec<usize>,
    },
    /// Median duration of `2r - 1` counting executions.
    Counting {
        r: u32,
        rho: f64,
    },
    /// Near-maximum set size of `n` shifted `GeomCap(phi, kappa - 1)` draws.
    Geomcap {
        phi: f64,
        kappa: u32,
        n: usize,
    },
    /// Circuit formation against a brute-force closure on one random case.
    Closure {
        max_n: usize,
        max_k: usize,
    },
    /// Two-party replay of `rounds` rounds over a random balanced cut.
    Cutsim {
        program: CutProgram,
        rounds: u64,
    },
}

impl Algorithm {
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Mst { .. } => "mst",
            Algorithm::Spanner {
                low_memory: false, ..
            } => "spanner",
            Algorithm::Spanner {
                low_memory: true, ..
            } => "spanner-low-memory",
            Algorithm::Verify { .. } => "verify",
            Algorithm::Counting { .. } => "counting",
            Algorithm::Geomcap { .. } => "geomcap",
            Algorithm::Closure { .. } => "closure",
            Algorithm::Cutsim { .. } => "cutsim",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum CutProgram {
    Mst { c: u32 },
    Spanner { kappa: u32, eps: f64, c: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSource {
    /// One graph file for every seed.
    File { path: PathBuf },
    /// A fresh graph per (size, seed).
    Family {
        family: Family,
        sizes: Vec<usize>,
        #[serde(default)]
        weights: Option<WeightMode>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    /// `p = min(1, degree / (n - 1))`.
    GnpConnected {
        degree: f64,
    },
    Path,
    Cycle,
    /// The squarest grid with exactly `n` nodes.
    Grid,
    Complete,
    Star,
    TreePlusChords {
        chords: usize,
    },
}

impl Family {
    pub fn kind(self, n: usize) -> GraphKind {
        match self {
            Family::GnpConnected { degree } => GraphKind::GnpConnected {
                n,
                p: (degree / (n.max(2) - 1) as f64).min(1.0),
            },
            Family::Path => GraphKind::Path { n },
            Family::Cycle => GraphKind::Cycle { n },
            Family::Grid => {
                let mut rows = (n as f64).sqrt() as usize;
                while rows > 1 && !n.is_multiple_of(rows) {
                    rows -= 1;
                }
                GraphKind::Grid {
                    rows: rows.max(1),
                    cols: n / rows.max(1),
                }
            }
            Family::Complete => GraphKind::Complete { n },
            Family::Star => GraphKind::Star { n },
            Family::TreePlusChords { chords } => GraphKind::TreePlusChords { n, chords },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Seeds {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl Seeds {
    pub fn expand(&self) -> Vec<u64> {
        match self {
            Seeds::List(s) => s.clone(),
            Seeds::Range { start, count } => (*start..start + count).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses JSON, naming the offending field on schema errors.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Config {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }
}
