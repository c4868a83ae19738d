//! Seeded batches, oracle comparisons, CSV/JSON reports and round-count fits.
//!
//! CSV columns (version 1): `version, experiment, algorithm, n, m, seed,
//! status, rounds, output_size, output_weight, decision, expected, oracle_ok,
//! flags, value, reference`. The JSON summary (version 1) is [`Summary`].

mod batch;
pub mod closure;
mod config;
mod fit;
mod presets;

pub use batch::{
    rows_from_csv, rows_to_csv, run_batch, ExperimentResult, RunRow, SizeSummary, Summary,
};
pub use config::{
    Algorithm, CutProgram, ExperimentConfig, Family, GraphSource, OutputPaths, Seeds,
    DEFAULT_MAX_ROUNDS,
};
pub use fit::{fit_points, fit_rounds, mean_rounds, Fit, FitModel};
pub use presets::{preset, PRESETS};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cutsim::CutsimError;
use crate::engine::EngineError;
use crate::graph::GraphError;
use crate::mst::MstError;
use crate::spanner::{SamplerError, SpannerError};
use crate::verification::VerifyError;

pub const CSV_VERSION: u32 = 1;
pub const SUMMARY_VERSION: u32 = 1;

/// Overrides the default output directory.
pub const OUT_DIR_ENV: &str = "GRC_OUT_DIR";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at {path}: {msg}")]
    Config { path: String, msg: String },
    #[error("no seeds")]
    NoSeeds,
    #[error("config lacks {0}")]
    Missing(&'static str),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("fit needs at least 2 distinct n, got {0}")]
    FitDomain(usize),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Mst(#[from] MstError),
    #[error(transparent)]
    Spanner(#[from] SpannerError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Cutsim(#[from] CutsimError),
}

/// `$GRC_OUT_DIR` if set, else `grc-out`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("grc-out"))
}

fn write_file(path: &Path, text: &str) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

/// Writes the CSV rows and JSON summary wherever `paths` names a file.
pub fn write_outputs(result: &ExperimentResult, paths: &OutputPaths) -> Result<(), HarnessError> {
    if let Some(p) = &paths.csv {
        write_file(p, &result.to_csv()?)?;
    }
    if let Some(p) = &paths.json {
        write_file(p, &result.summary_json())?;
    }
    Ok(())
}

/// Runs a batch and writes the outputs its config names.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    let result = run_batch(cfg)?;
    write_outputs(&result, &cfg.output)?;
    Ok(result)
}
