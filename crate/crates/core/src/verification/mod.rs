//! Distributed verification of subgraph properties. Every node ends with the
//! same boolean answer.

mod instances;
mod oracle;
mod program;

pub use instances::{instance_pair, InstancePair};
pub use oracle::oracle_answer;
pub use program::{Verify, VerifyInput, VerifyMachine, VerifyProc};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{run_until_halt, EngineError, RandomSource, RunStatus, TraceMode};
use crate::graph::{Graph, GraphError};
use crate::primitives::GrcProgram;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("instance lacks {0}")]
    Missing(&'static str),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    /// `H` is a minimum spanning tree.
    Mst,
    /// `H` spans every node and is connected.
    ConnectedSpanning,
    /// The distinguished edge lies on a cycle of `H`.
    ECycle,
    /// `s` and `t` are connected in `H`.
    StConnectivity,
    /// `H` is connected on the nodes it touches.
    Connectivity,
    /// Removing `E_H` disconnects the graph.
    Cut,
    /// The distinguished edge lies on every path between its endpoints in `H`.
    EdgeOnAllPaths,
    /// Removing `E_H` separates `s` from `t`.
    StCut,
    HamiltonianCycle,
    SimplePath,
}

impl Task {
    pub const ALL: [Task; 10] = [
        Task::Mst,
        Task::ConnectedSpanning,
        Task::ECycle,
        Task::StConnectivity,
        Task::Connectivity,
        Task::Cut,
        Task::EdgeOnAllPaths,
        Task::StCut,
        Task::HamiltonianCycle,
        Task::SimplePath,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Mst => "mst",
            Task::ConnectedSpanning => "connected-spanning",
            Task::ECycle => "e-cycle",
            Task::StConnectivity => "st-connectivity",
            Task::Connectivity => "connectivity",
            Task::Cut => "cut",
            Task::EdgeOnAllPaths => "edge-on-all-paths",
            Task::StCut => "st-cut",
            Task::HamiltonianCycle => "hamiltonian-cycle",
            Task::SimplePath => "simple-path",
        }
    }

    pub fn needs_st(self) -> bool {
        matches!(self, Task::StConnectivity | Task::StCut)
    }

    pub fn needs_edge(self) -> bool {
        matches!(self, Task::ECycle | Task::EdgeOnAllPaths)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| VerifyError::UnknownTask(s.to_string()))
    }
}

/// Per-node inputs for `task` from the instance stored in `graph`.
pub fn verify_inputs(task: Task, graph: &Graph) -> Result<Vec<VerifyInput>, VerifyError> {
    let mask = graph.subgraph().ok_or(VerifyError::Missing("subgraph"))?;
    let h = graph.port_bits(mask);
    let st = if task.needs_st() {
        Some(graph.st().ok_or(VerifyError::Missing("s and t"))?)
    } else {
        None
    };
    let marked = if task.needs_edge() {
        Some(
            graph
                .marked_edge()
                .ok_or(VerifyError::Missing("distinguished edge"))?,
        )
    } else {
        None
    };
    let weights = if task == Task::Mst {
        let w = graph.weights().ok_or(VerifyError::Missing("weights"))?;
        graph.port_values(w)
    } else {
        vec![Vec::new(); graph.n()]
    };
    Ok(h.into_iter()
        .zip(weights)
        .enumerate()
        .map(|(v, (h_ports, weights))| VerifyInput {
            h_ports,
            s: st.is_some_and(|(s, _)| s == v),
            t: st.is_some_and(|(_, t)| t == v),
            marked_port: marked.and_then(|e| graph.port_of(v, e)),
            weights,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyRun {
    pub task: Task,
    /// The answer of node 0; `None` on timeout.
    pub decision: Option<bool>,
    pub unanimous: bool,
    pub rounds: u64,
    pub status: RunStatus,
}

pub fn verify(
    task: Task,
    graph: &Graph,
    c: u32,
    source: &dyn RandomSource,
    max_rounds: u64,
) -> Result<VerifyRun, VerifyError> {
    let inputs = verify_inputs(task, graph)?;
    let res = run_until_halt(
        graph,
        &GrcProgram(Verify { task, c }),
        &inputs,
        source,
        max_rounds,
        TraceMode::Off,
    )?;
    let decision = res.outputs.first().copied().flatten();
    Ok(VerifyRun {
        task,
        decision,
        unanimous: res.outputs.iter().all(|&o| o == decision),
        rounds: res.rounds,
        status: res.status,
    })
}
