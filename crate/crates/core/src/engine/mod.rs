//! Round semantics of the reconfigurable circuit model.
//!
//! Every edge carries `k` pins. In each round a node binds its incident pins
//! into a local partition; the transitive closure of all local bindings forms
//! the circuits. A beep on any pin of a circuit is heard on every pin of that
//! circuit, including by the beeping node itself.
//!
//! Programs only see their degree, their local input, port numbers, pin
//! indices, their own state and feedback bits.

mod rng;
mod sim;
mod trace;

pub use rng::{coin, RandomSource, SeededStreams};
pub use sim::{run_until_halt, Feedback, RunResult, RunStatus, Simulation};
pub use trace::{NodeRecord, RoundRecord, Trace, TraceMode};

use std::fmt;

use rand::RngCore;
use thiserror::Error;

use crate::dsu::UnionFind;
use crate::graph::Graph;

/// A pin in the global pin universe `E x [k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PinId {
    pub edge: usize,
    pub index: usize,
}

/// A pin as seen by its owner: port number and pin index, both zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalPin {
    pub port: usize,
    pub index: usize,
}

impl LocalPin {
    pub fn new(port: usize, index: usize) -> Self {
        LocalPin { port, index }
    }
}

/// Rendered one-based as `port.index`.
impl fmt::Display for LocalPin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.port + 1, self.index + 1)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("pin {0} is not incident")]
    OutOfRange(LocalPin),
    #[error("pin {0} appears twice")]
    Duplicate(LocalPin),
    #[error("pin {0} is missing")]
    Omitted(LocalPin),
    #[error("empty part")]
    EmptyPart,
    #[error("expected {expected} pins, got {got}")]
    WrongSize { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("malformed partition at node {node}: {reason}")]
    MalformedPartition { node: usize, reason: PartitionError },
    #[error("contract violation at node {node}: beep on non-incident pin {pin}")]
    ContractViolation { node: usize, pin: LocalPin },
    #[error("program error at node {node} in round {round}: {source}")]
    Program {
        node: usize,
        round: u64,
        source: ProgramError,
    },
    #[error("expected {expected} node inputs, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("max_rounds must be positive")]
    NoRounds,
}

/// Partition of a node's pins, stored as dense part labels indexed by
/// `port * k + index`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalPartition {
    labels: Vec<u32>,
    parts: u32,
}

impl LocalPartition {
    pub fn singletons(degree: usize, k: usize) -> Self {
        let n = degree * k;
        LocalPartition {
            labels: (0..n as u32).collect(),
            parts: n as u32,
        }
    }

    /// Builds from arbitrary labels; pins with equal labels share a part.
    pub fn from_labels(labels: &[u32]) -> Self {
        let mut dense = Vec::with_capacity(labels.len());
        let mut seen: Vec<(u32, u32)> = Vec::new();
        for &l in labels {
            let d = match seen.iter().find(|(raw, _)| *raw == l) {
                Some(&(_, d)) => d,
                None => {
                    let d = seen.len() as u32;
                    seen.push((l, d));
                    d
                }
            };
            dense.push(d);
        }
        LocalPartition {
            labels: dense,
            parts: seen.len() as u32,
        }
    }

    /// Builds from explicit parts; every pin of `E(v) x [k]` must appear in
    /// exactly one part.
    pub fn from_parts(
        degree: usize,
        k: usize,
        parts: &[Vec<LocalPin>],
    ) -> Result<Self, PartitionError> {
        let mut labels = vec![u32::MAX; degree * k];
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(PartitionError::EmptyPart);
            }
            for &pin in part {
                if pin.port >= degree || pin.index >= k {
                    return Err(PartitionError::OutOfRange(pin));
                }
                let slot = &mut labels[pin.port * k + pin.index];
                if *slot != u32::MAX {
                    return Err(PartitionError::Duplicate(pin));
                }
                *slot = i as u32;
            }
        }
        if let Some(pos) = labels.iter().position(|&l| l == u32::MAX) {
            return Err(PartitionError::Omitted(LocalPin::new(pos / k, pos % k)));
        }
        Ok(LocalPartition {
            labels,
            parts: parts.len() as u32,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn part_count(&self) -> usize {
        self.parts as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, pin: LocalPin, k: usize) -> u32 {
        self.labels[pin.port * k + pin.index]
    }

    /// Parts as pin lists, ordered by label.
    pub fn parts(&self, k: usize) -> Vec<Vec<LocalPin>> {
        let mut out = vec![Vec::new(); self.parts as usize];
        for (pos, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(LocalPin::new(pos / k, pos % k));
        }
        out
    }

    fn check_size(&self, degree: usize, k: usize) -> Result<(), PartitionError> {
        if self.labels.len() != degree * k {
            return Err(PartitionError::WrongSize {
                expected: degree * k,
                got: self.labels.len(),
            });
        }
        Ok(())
    }
}

/// Renders parts as `{1.1,2.1}{1.2}` with one-based ports and pin indices.
pub fn render_partition(p: &LocalPartition, k: usize) -> String {
    let mut s = String::new();
    for part in p.parts(k) {
        s.push('{');
        for (i, pin) in part.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&pin.to_string());
        }
        s.push('}');
    }
    s
}

/// The circuits of one round: a class label for every global pin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitPartition {
    k: usize,
    class_of: Vec<u32>,
    count: usize,
}

impl CircuitPartition {
    /// Round-0 configuration: every pin is its own circuit.
    pub fn singletons(m: usize, k: usize) -> Self {
        CircuitPartition {
            k,
            class_of: (0..(m * k) as u32).collect(),
            count: m * k,
        }
    }

    pub(crate) fn from_dense(k: usize, class_of: Vec<u32>, count: usize) -> Self {
        CircuitPartition { k, class_of, count }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pin_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.count
    }

    pub fn class_of(&self, pin: PinId) -> usize {
        self.class_of[pin.edge * self.k + pin.index] as usize
    }

    pub(crate) fn class_of_flat(&self, flat: usize) -> usize {
        self.class_of[flat] as usize
    }

    /// Classes as sorted pin lists, in order of their smallest pin.
    pub fn classes(&self) -> Vec<Vec<PinId>> {
        let mut out = vec![Vec::new(); self.count];
        for (flat, &c) in self.class_of.iter().enumerate() {
            out[c as usize].push(PinId {
                edge: flat / self.k,
                index: flat % self.k,
            });
        }
        out
    }
}

/// Forms the circuits induced by one partition per node.
pub fn form_circuits(
    graph: &Graph,
    k: usize,
    partitions: &[LocalPartition],
) -> Result<CircuitPartition, EngineError> {
    if partitions.len() != graph.n() {
        return Err(EngineError::InputCount {
            expected: graph.n(),
            got: partitions.len(),
        });
    }
    let mut uf = UnionFind::new(graph.m() * k);
    let mut first: Vec<usize> = Vec::new();
    for (v, part) in partitions.iter().enumerate() {
        part.check_size(graph.degree(v), k)
            .map_err(|reason| EngineError::MalformedPartition { node: v, reason })?;
        bind_node(graph, k, v, part, &mut uf, &mut first);
    }
    let (labels, count) = uf.labels();
    Ok(CircuitPartition {
        k,
        class_of: labels,
        count,
    })
}

/// Like [`form_circuits`], validating raw part lists first.
pub fn form_circuits_from_parts(
    graph: &Graph,
    k: usize,
    parts: &[Vec<Vec<LocalPin>>],
) -> Result<CircuitPartition, EngineError> {
    let partitions = parts
        .iter()
        .enumerate()
        .map(|(v, p)| {
            LocalPartition::from_parts(graph.degree(v), k, p)
                .map_err(|reason| EngineError::MalformedPartition { node: v, reason })
        })
        .collect::<Result<Vec<_>, _>>()?;
    form_circuits(graph, k, &partitions)
}

pub(crate) fn bind_node(
    graph: &Graph,
    k: usize,
    v: usize,
    part: &LocalPartition,
    uf: &mut UnionFind,
    first: &mut Vec<usize>,
) {
    first.clear();
    first.resize(part.part_count(), usize::MAX);
    for (port, inc) in graph.ports(v).iter().enumerate() {
        for idx in 0..k {
            let flat = inc.edge * k + idx;
            let l = part.labels[port * k + idx] as usize;
            if first[l] == usize::MAX {
                first[l] = flat;
            } else {
                uf.union(first[l], flat);
            }
        }
    }
}

/// Per-node immutable knowledge: degree and task input.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a, I> {
    pub degree: usize,
    pub input: &'a I,
}

/// A node state machine, shared by all nodes of a run.
///
/// Per round: [`NodeProgram::beep`] decides the beep set from the state,
/// the engine computes feedback, then [`NodeProgram::step`] updates the state
/// and may return the partition for the next round (`None` keeps the current
/// one). Round 0 uses all-singleton partitions.
pub trait NodeProgram {
    type State: Clone + fmt::Debug;
    type Input;
    type Output: Clone + fmt::Debug;

    /// Pins per edge.
    fn pins(&self) -> usize;

    fn init(&self, view: NodeView<'_, Self::Input>, rng: &mut dyn RngCore) -> Self::State;

    fn beep(&self, state: &mut Self::State, rng: &mut dyn RngCore, out: &mut Vec<LocalPin>);

    fn step(
        &self,
        state: &mut Self::State,
        feedback: &Feedback<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Option<LocalPartition>, ProgramError>;

    fn halted(&self, state: &Self::State) -> bool;

    fn output(&self, state: &Self::State) -> Self::Output;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pin(port: usize, index: usize) -> LocalPin {
        LocalPin::new(port, index)
    }

    #[test]
    fn from_parts_validation() {
        assert_eq!(
            LocalPartition::from_parts(2, 1, &[vec![pin(0, 0)]]),
            Err(PartitionError::Omitted(pin(1, 0)))
        );
        assert_eq!(
            LocalPartition::from_parts(2, 1, &[vec![pin(0, 0), pin(1, 0)], vec![pin(0, 0)]]),
            Err(PartitionError::Duplicate(pin(0, 0)))
        );
        assert_eq!(
            LocalPartition::from_parts(1, 1, &[vec![pin(0, 1)]]),
            Err(PartitionError::OutOfRange(pin(0, 1)))
        );
        let p = LocalPartition::from_parts(
            2,
            2,
            &[vec![pin(0, 0), pin(1, 1)], vec![pin(0, 1)], vec![pin(1, 0)]],
        )
        .unwrap();
        assert_eq!(p.part_count(), 3);
        assert_eq!(render_partition(&p, 2), "{1.1,2.2}{1.2}{2.1}");
    }

    #[test]
    fn from_labels_densifies() {
        let p = LocalPartition::from_labels(&[7, 3, 7, 9]);
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        assert_eq!(p.part_count(), 3);
    }

    #[test]
    fn malformed_partition_names_node() {
        let g = Graph::from_edges(3, 1, &[(0, 1), (1, 2)]).unwrap();
        let parts = vec![
            vec![vec![pin(0, 0)]],
            vec![vec![pin(0, 0)]],
            vec![vec![pin(0, 0)]],
        ];
        let err = form_circuits_from_parts(&g, 1, &parts).unwrap_err();
        assert!(matches!(
            err,
            EngineError::MalformedPartition { node: 1, .. }
        ));
        assert!(err.to_string().contains("node 1"));
    }

    #[test]
    fn path_middle_binding_forms_one_circuit() {
        let g = Graph::from_edges(3, 1, &[(0, 1), (1, 2)]).unwrap();
        let parts = vec![
            vec![vec![pin(0, 0)]],
            vec![vec![pin(0, 0), pin(1, 0)]],
            vec![vec![pin(0, 0)]],
        ];
        let c = form_circuits_from_parts(&g, 1, &parts).unwrap();
        assert_eq!(c.class_count(), 1);
    }

    #[test]
    fn singletons_stay_separate() {
        let g = Graph::from_edges(4, 2, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let parts: Vec<_> = (0..4)
            .map(|v| LocalPartition::singletons(g.degree(v), 2))
            .collect();
        let c = form_circuits(&g, 2, &parts).unwrap();
        assert_eq!(c.class_count(), 8);
        assert_eq!(c, CircuitPartition::singletons(4, 2));
    }
}
