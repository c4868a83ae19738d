use std::sync::Arc;

use rand::RngCore;

use super::trace::{NodeRecord, RoundRecord, Trace, TraceMode};
use super::{
    bind_node, CircuitPartition, EngineError, LocalPartition, LocalPin, NodeProgram, NodeView,
    RandomSource,
};
use crate::dsu::UnionFind;
use crate::graph::{Graph, Incidence};

/// The feedback bits of one node for the current round.
pub struct Feedback<'a> {
    k: usize,
    ports: &'a [Incidence],
    circuits: &'a CircuitPartition,
    beeped: &'a [bool],
}

impl<'a> Feedback<'a> {
    pub fn degree(&self) -> usize {
        self.ports.len()
    }

    pub fn pins(&self) -> usize {
        self.k
    }

    /// Whether some node (possibly this one) beeped on the circuit of `pin`.
    pub fn get(&self, pin: LocalPin) -> bool {
        let flat = self.ports[pin.port].edge * self.k + pin.index;
        self.beeped[self.circuits.class_of_flat(flat)]
    }

    /// All bits in `port * k + index` order.
    pub fn bits(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.ports.len() * self.k);
        for port in 0..self.ports.len() {
            for index in 0..self.k {
                out.push(self.get(LocalPin::new(port, index)));
            }
        }
        out
    }
}

/// Feedback reconstructed outside the engine, e.g. by a replay.
impl<'a> Feedback<'a> {
    pub(crate) fn new(
        k: usize,
        ports: &'a [Incidence],
        circuits: &'a CircuitPartition,
        beeped: &'a [bool],
    ) -> Self {
        Feedback {
            k,
            ports,
            circuits,
            beeped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    Timeout,
}

#[derive(Debug, Clone)]
pub struct RunResult<O> {
    pub outputs: Vec<O>,
    pub rounds: u64,
    pub status: RunStatus,
    pub trace: Option<Trace>,
}

/// One engine instance: a graph, a program, and the evolving node states.
pub struct Simulation<'a, P: NodeProgram> {
    graph: &'a Graph,
    program: &'a P,
    k: usize,
    states: Vec<P::State>,
    partitions: Vec<LocalPartition>,
    circuits: Arc<CircuitPartition>,
    dirty: bool,
    rngs: Vec<Box<dyn RngCore + Send>>,
    round: u64,
    trace: Option<Trace>,
    beeps: Vec<Vec<LocalPin>>,
    beeped: Vec<bool>,
    scratch: Vec<usize>,
}

impl<'a, P: NodeProgram> Simulation<'a, P> {
    pub fn new(
        graph: &'a Graph,
        program: &'a P,
        inputs: &[P::Input],
        source: &dyn RandomSource,
        mode: TraceMode,
    ) -> Result<Self, EngineError> {
        let n = graph.n();
        if inputs.len() != n {
            return Err(EngineError::InputCount {
                expected: n,
                got: inputs.len(),
            });
        }
        let k = program.pins();
        let mut rngs: Vec<Box<dyn RngCore + Send>> =
            (0..n).map(|v| source.node_stream(v)).collect();
        let states = (0..n)
            .map(|v| {
                let view = NodeView {
                    degree: graph.degree(v),
                    input: &inputs[v],
                };
                program.init(view, rngs[v].as_mut())
            })
            .collect();
        let partitions = (0..n)
            .map(|v| LocalPartition::singletons(graph.degree(v), k))
            .collect();
        Ok(Simulation {
            graph,
            program,
            k,
            states,
            partitions,
            circuits: Arc::new(CircuitPartition::singletons(graph.m(), k)),
            dirty: false,
            rngs,
            round: 0,
            trace: match mode {
                TraceMode::Off => None,
                TraceMode::Full => Some(Trace::new(k)),
            },
            beeps: vec![Vec::new(); n],
            beeped: Vec::new(),
            scratch: Vec::new(),
        })
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn pins(&self) -> usize {
        self.k
    }

    pub fn states(&self) -> &[P::State] {
        &self.states
    }

    pub fn partitions(&self) -> &[LocalPartition] {
        &self.partitions
    }

    /// Circuits in effect for the next round.
    pub fn circuits(&mut self) -> &CircuitPartition {
        self.refresh_circuits();
        &self.circuits
    }

    pub fn all_halted(&self) -> bool {
        self.states.iter().all(|s| self.program.halted(s))
    }

    pub fn outputs(&self) -> Vec<P::Output> {
        self.states.iter().map(|s| self.program.output(s)).collect()
    }

    pub fn trace(&self) -> Option<&Trace> {
        self.trace.as_ref()
    }

    pub fn into_trace(self) -> Option<Trace> {
        self.trace
    }

    fn refresh_circuits(&mut self) {
        if !self.dirty {
            return;
        }
        let mut uf = UnionFind::new(self.graph.m() * self.k);
        for (v, part) in self.partitions.iter().enumerate() {
            bind_node(self.graph, self.k, v, part, &mut uf, &mut self.scratch);
        }
        let (labels, count) = uf.labels();
        self.circuits = Arc::new(CircuitPartition {
            k: self.k,
            class_of: labels,
            count,
        });
        self.dirty = false;
    }

    /// Executes one round: beeps, feedback, transitions.
    pub fn step_round(&mut self) -> Result<(), EngineError> {
        self.refresh_circuits();
        let n = self.graph.n();
        let k = self.k;
        self.beeped.clear();
        self.beeped.resize(self.circuits.class_count(), false);

        let mut halted = vec![false; n];
        for v in 0..n {
            let buf = &mut self.beeps[v];
            buf.clear();
            if self.program.halted(&self.states[v]) {
                halted[v] = true;
                continue;
            }
            self.program
                .beep(&mut self.states[v], self.rngs[v].as_mut(), buf);
            let ports = self.graph.ports(v);
            for &pin in buf.iter() {
                if pin.port >= ports.len() || pin.index >= k {
                    return Err(EngineError::ContractViolation { node: v, pin });
                }
                let flat = ports[pin.port].edge * k + pin.index;
                self.beeped[self.circuits.class_of_flat(flat)] = true;
            }
        }

        let mut records = self.trace.as_ref().map(|_| Vec::with_capacity(n));
        for v in 0..n {
            let ports = self.graph.ports(v);
            let fb = Feedback::new(k, ports, &self.circuits, &self.beeped);
            let old_partition = records.as_ref().map(|_| self.partitions[v].clone());
            if !halted[v] {
                let next = self
                    .program
                    .step(&mut self.states[v], &fb, self.rngs[v].as_mut())
                    .map_err(|source| EngineError::Program {
                        node: v,
                        round: self.round,
                        source,
                    })?;
                if let Some(p) = next {
                    p.check_size(ports.len(), k)
                        .map_err(|reason| EngineError::MalformedPartition { node: v, reason })?;
                    if p != self.partitions[v] {
                        self.partitions[v] = p;
                        self.dirty = true;
                    }
                }
            }
            if let Some(recs) = records.as_mut() {
                let mut beeps = self.beeps[v].clone();
                beeps.sort_unstable();
                beeps.dedup();
                recs.push(NodeRecord {
                    partition: old_partition.unwrap_or_else(|| self.partitions[v].clone()),
                    beeps,
                    feedback: fb.bits(),
                    state: format!("{:?}", self.states[v]),
                    halted: halted[v],
                });
            }
        }
        if let (Some(trace), Some(nodes)) = (self.trace.as_mut(), records) {
            trace.rounds.push(RoundRecord {
                round: self.round,
                circuits: Arc::clone(&self.circuits),
                nodes,
            });
        }
        self.round += 1;
        Ok(())
    }
}

/// Runs until every node halts or `max_rounds` rounds have elapsed.
pub fn run_until_halt<P: NodeProgram>(
    graph: &Graph,
    program: &P,
    inputs: &[P::Input],
    source: &dyn RandomSource,
    max_rounds: u64,
    mode: TraceMode,
) -> Result<RunResult<P::Output>, EngineError> {
    if max_rounds == 0 {
        return Err(EngineError::NoRounds);
    }
    let mut sim = Simulation::new(graph, program, inputs, source, mode)?;
    let mut status = RunStatus::Completed;
    while !sim.all_halted() {
        if sim.round() >= max_rounds {
            status = RunStatus::Timeout;
            break;
        }
        sim.step_round()?;
    }
    Ok(RunResult {
        outputs: sim.outputs(),
        rounds: sim.round(),
        status,
        trace: sim.into_trace(),
    })
}
