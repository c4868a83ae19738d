//! Named batches, one group per acceptance criterion.

use crate::graph::WeightMode;
use crate::verification::Task;

use super::config::{
    Algorithm, CutProgram, ExperimentConfig, Family, GraphSource, OutputPaths, Seeds,
    DEFAULT_MAX_ROUNDS,
};
use super::HarnessError;

pub const PRESETS: [&str; 8] = ["c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8"];

/// Sparse connected random graphs.
const GNP: Family = Family::GnpConnected { degree: 6.0 };

fn config(
    name: &str,
    algorithm: Algorithm,
    graph: Option<GraphSource>,
    seeds: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        algorithm,
        graph,
        seeds: Seeds::Range {
            start: 0,
            count: seeds,
        },
        max_rounds: DEFAULT_MAX_ROUNDS,
        output: OutputPaths::default(),
    }
}

fn family(family: Family, sizes: &[usize], weights: Option<WeightMode>) -> Option<GraphSource> {
    Some(GraphSource::Family {
        family,
        sizes: sizes.to_vec(),
        weights,
    })
}

/// The batches of a named preset.
pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let w16 = Some(WeightMode::Uniform { max: 16 });
    Ok(match name {
        "c1" => vec![config(
            "c1-closure",
            Algorithm::Closure {
                max_n: 12,
                max_k: 3,
            },
            None,
            10_000,
        )],
        "c2" => vec![config(
            "c2-counting",
            Algorithm::Counting { r: 6, rho: 0.5 },
            family(Family::Path, &[64, 256], None),
            1000,
        )],
        "c3" => vec![config(
            "c3-mst",
            Algorithm::Mst { c: 3 },
            family(GNP, &[16, 32, 64, 128], w16),
            200,
        )],
        "c4" => vec![
            config(
                "c4-spanner",
                Algorithm::Spanner {
                    kappa: 3,
                    eps: 0.5,
                    c: 3,
                    low_memory: false,
                },
                family(GNP, &[128], None),
                100,
            ),
            config(
                "c4-spanner-low-memory",
                Algorithm::Spanner {
                    kappa: 3,
                    eps: 0.5,
                    c: 3,
                    low_memory: true,
                },
                family(GNP, &[16, 32, 64, 128], None),
                100,
            ),
        ],
        "c5" => [0.5, 0.8]
            .iter()
            .map(|&phi| {
                config(
                    &format!("c5-geomcap-{phi}"),
                    Algorithm::Geomcap {
                        phi,
                        kappa: 6,
                        n: 64,
                    },
                    None,
                    10_000,
                )
            })
            .collect(),
        "c6" => Task::ALL
            .iter()
            .map(|&task| {
                config(
                    &format!("c6-{task}"),
                    Algorithm::Verify {
                        task,
                        c: 3,
                        sizes: vec![8, 16, 32, 64],
                    },
                    None,
                    50,
                )
            })
            .collect(),
        "c7" => vec![
            config(
                "c7-cutsim-mst",
                Algorithm::Cutsim {
                    program: CutProgram::Mst { c: 3 },
                    rounds: 50,
                },
                family(GNP, &[32], w16),
                10,
            ),
            config(
                "c7-cutsim-spanner",
                Algorithm::Cutsim {
                    program: CutProgram::Spanner {
                        kappa: 3,
                        eps: 0.5,
                        c: 3,
                    },
                    rounds: 50,
                },
                family(GNP, &[32], None),
                10,
            ),
        ],
        "c8" => vec![config(
            "c8-determinism",
            Algorithm::Mst { c: 3 },
            family(GNP, &[16, 32], w16),
            20,
        )],
        other => return Err(HarnessError::UnknownPreset(other.to_string())),
    })
}
