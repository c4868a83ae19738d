//! Two-party simulation of circuit rounds across a node bipartition.
//!
//! Alice holds the nodes of `A`, Bob those of `B`. Per round each side
//! projects the pin binding onto its own nodes, names the projected classes
//! that reach a cut pin, and sends one name plus one beep bit per cut pin.
//! Merging the two name lists recovers which cut pins share a circuit, which
//! is all either side needs to produce exact feedback for its own pins.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dsu::UnionFind;
use crate::engine::{
    bind_node, CircuitPartition, EngineError, Feedback, LocalPartition, LocalPin, NodeProgram,
    NodeView, PinId, RandomSource, Simulation, Trace, TraceMode,
};
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum CutsimError {
    #[error("both sides of the cut must be nonempty")]
    EmptySide,
    #[error("side assignment has {got} entries for {expected} nodes")]
    SideLength { expected: usize, got: usize },
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("cut file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("replayed beeps of node {node} differ from the trace in round {round}")]
    TraceCorruption { round: u64, node: usize },
    #[error("trace has {got} node records in round {round}, expected {expected}")]
    TraceShape {
        round: u64,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::A, Side::B];
}

/// A bipartition of the nodes plus the ordered cut pins `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutInstance {
    k: usize,
    in_a: Vec<bool>,
    q: Vec<PinId>,
}

impl CutInstance {
    pub fn new(graph: &Graph, k: usize, in_a: Vec<bool>) -> Result<Self, CutsimError> {
        if in_a.len() != graph.n() {
            return Err(CutsimError::SideLength {
                expected: graph.n(),
                got: in_a.len(),
            });
        }
        if in_a.iter().all(|&a| a) || in_a.iter().all(|&a| !a) {
            return Err(CutsimError::EmptySide);
        }
        let mut q = Vec::new();
        for (edge, &(u, v)) in graph.edges().iter().enumerate() {
            if in_a[u] != in_a[v] {
                q.extend((0..k).map(|index| PinId { edge, index }));
            }
        }
        Ok(CutInstance { k, in_a, q })
    }

    /// `A` is the given node list.
    pub fn from_nodes(graph: &Graph, k: usize, a: &[usize]) -> Result<Self, CutsimError> {
        let mut in_a = vec![false; graph.n()];
        for &v in a {
            *in_a.get_mut(v).ok_or(CutsimError::NodeOutOfRange(v))? = true;
        }
        Self::new(graph, k, in_a)
    }

    /// A uniformly random half of the nodes forms `A`.
    pub fn random_balanced(graph: &Graph, k: usize, seed: u64) -> Result<Self, CutsimError> {
        let mut order: Vec<usize> = (0..graph.n()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::from_nodes(graph, k, &order[..graph.n() / 2])
    }

    /// Reads the nodes of `A`, separated by whitespace or commas. `#` starts
    /// a comment.
    pub fn parse(graph: &Graph, k: usize, text: &str) -> Result<Self, CutsimError> {
        let mut a = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("");
            for tok in body.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let v: usize = tok.parse().map_err(|_| CutsimError::Parse {
                    line: i + 1,
                    msg: format!("not a node id: {tok:?}"),
                })?;
                if v >= graph.n() {
                    return Err(CutsimError::Parse {
                        line: i + 1,
                        msg: format!("node {v} out of range"),
                    });
                }
                a.push(v);
            }
        }
        Self::from_nodes(graph, k, &a)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn side_of(&self, v: usize) -> Side {
        if self.in_a[v] {
            Side::A
        } else {
            Side::B
        }
    }

    pub fn nodes(&self, side: Side) -> impl Iterator<Item = usize> + '_ {
        (0..self.in_a.len()).filter(move |&v| self.side_of(v) == side)
    }

    /// The cut pins in (edge, pin) order.
    pub fn cut_pins(&self) -> &[PinId] {
        &self.q
    }

    /// Bits per name: `ceil(log2 |Q|)`.
    pub fn name_width(&self) -> u32 {
        ceil_log2(self.q.len())
    }

    /// `2 |Q| (ceil(log2 |Q|) + 1)`.
    pub fn bound_per_round(&self) -> usize {
        2 * self.q.len() * (self.name_width() as usize + 1)
    }
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// The binding closure restricted to one side's nodes, over all `m * k` pins.
/// Pins on edges the side does not touch stay singletons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub side: Side,
    pub class_of: Vec<u32>,
    pub count: usize,
}

impl Projection {
    pub fn class(&self, k: usize, pin: PinId) -> usize {
        self.class_of[pin.edge * k + pin.index] as usize
    }
}

/// Projects the pin binding onto the nodes of `side`. Only those nodes'
/// partitions are read.
pub fn project_classes(
    graph: &Graph,
    inst: &CutInstance,
    side: Side,
    partitions: &[LocalPartition],
) -> Projection {
    let k = inst.k;
    let mut uf = UnionFind::new(graph.m() * k);
    let mut first = Vec::new();
    for v in inst.nodes(side) {
        bind_node(graph, k, v, &partitions[v], &mut uf, &mut first);
    }
    let (class_of, count) = uf.labels();
    Projection {
        side,
        class_of,
        count,
    }
}

/// Rebuilds the full circuit partition from the two projections.
pub fn glue(graph: &Graph, k: usize, a: &Projection, b: &Projection) -> CircuitPartition {
    let mut uf = UnionFind::new(graph.m() * k);
    for p in [a, b] {
        let mut rep = vec![usize::MAX; p.count];
        for (flat, &c) in p.class_of.iter().enumerate() {
            let c = c as usize;
            if rep[c] == usize::MAX {
                rep[c] = flat;
            } else {
                uf.union(rep[c], flat);
            }
        }
    }
    let (labels, count) = uf.labels();
    CircuitPartition::from_dense(k, labels, count)
}

/// One side's message: a class name and a beep bit per cut pin, in `Q` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideMessage {
    pub width: u32,
    pub names: Vec<u32>,
    pub beeps: Vec<bool>,
}

impl SideMessage {
    /// Names classes by first appearance along `Q`.
    pub fn compose(inst: &CutInstance, proj: &Projection, class_beeped: &[bool]) -> Self {
        let mut name_of = vec![u32::MAX; proj.count];
        let mut next = 0;
        let mut names = Vec::with_capacity(inst.q.len());
        let mut beeps = Vec::with_capacity(inst.q.len());
        for &pin in &inst.q {
            let c = proj.class(inst.k, pin);
            if name_of[c] == u32::MAX {
                name_of[c] = next;
                next += 1;
            }
            names.push(name_of[c]);
            beeps.push(class_beeped[c]);
        }
        SideMessage {
            width: inst.name_width(),
            names,
            beeps,
        }
    }

    pub fn bit_len(&self) -> usize {
        self.names.len() * (self.width as usize + 1)
    }

    /// Name bits high to low, then the beep bit, per cut pin.
    pub fn to_bits(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.bit_len());
        for (&name, &beep) in self.names.iter().zip(&self.beeps) {
            for b in (0..self.width).rev() {
                out.push(name >> b & 1 == 1);
            }
            out.push(beep);
        }
        out
    }

    pub fn from_bits(bits: &[bool], width: u32) -> Self {
        let mut names = Vec::new();
        let mut beeps = Vec::new();
        for chunk in bits.chunks(width as usize + 1) {
            let (name, beep) = chunk.split_at(width as usize);
            names.push(name.iter().fold(0u32, |acc, &b| acc << 1 | b as u32));
            beeps.push(beep[0]);
        }
        SideMessage {
            width,
            names,
            beeps,
        }
    }
}

/// What one side knows after the exchange: its circuits (projected classes)
/// and whether each carries a beep.
#[derive(Debug, Clone)]
pub struct SideOutcome {
    pub side: Side,
    pub circuits: CircuitPartition,
    pub beeped: Vec<bool>,
}

impl SideOutcome {
    pub fn feedback<'a>(&'a self, graph: &'a Graph, v: usize) -> Feedback<'a> {
        Feedback::new(
            self.circuits.k(),
            graph.ports(v),
            &self.circuits,
            &self.beeped,
        )
    }
}

#[derive(Debug, Clone)]
pub struct RoundExchange {
    pub a: SideOutcome,
    pub b: SideOutcome,
    pub bits_exchanged: usize,
}

impl RoundExchange {
    pub fn outcome(&self, side: Side) -> &SideOutcome {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    /// Feedback bits of `v` as computed by its owner, `port * k + index` order.
    pub fn feedback_bits(&self, graph: &Graph, inst: &CutInstance, v: usize) -> Vec<bool> {
        self.outcome(inst.side_of(v)).feedback(graph, v).bits()
    }
}

fn local_beeps(
    graph: &Graph,
    inst: &CutInstance,
    proj: &Projection,
    beeps: &[Vec<LocalPin>],
) -> Vec<bool> {
    let mut out = vec![false; proj.count];
    for v in inst.nodes(proj.side) {
        let ports = graph.ports(v);
        for pin in &beeps[v] {
            let c = proj.class(
                inst.k,
                PinId {
                    edge: ports[pin.port].edge,
                    index: pin.index,
                },
            );
            out[c] = true;
        }
    }
    out
}

/// Combines the own projection with both messages into circuit beeps.
fn resolve(
    inst: &CutInstance,
    proj: &Projection,
    local: &[bool],
    own: &SideMessage,
    other: &SideMessage,
) -> SideOutcome {
    let q = inst.q.len();
    let mut uf = UnionFind::new(q);
    for msg in [own, other] {
        let mut first = vec![usize::MAX; q];
        for (i, &name) in msg.names.iter().enumerate() {
            let name = name as usize;
            if first[name] == usize::MAX {
                first[name] = i;
            } else {
                uf.union(first[name], i);
            }
        }
    }
    let mut group_beep = vec![false; q];
    for i in 0..q {
        if own.beeps[i] || other.beeps[i] {
            let r = uf.find(i);
            group_beep[r] = true;
        }
    }
    let mut beeped = local.to_vec();
    for (i, &pin) in inst.q.iter().enumerate() {
        let r = uf.find(i);
        beeped[proj.class(inst.k, pin)] = group_beep[r];
    }
    SideOutcome {
        side: proj.side,
        circuits: CircuitPartition::from_dense(inst.k, proj.class_of.clone(), proj.count),
        beeped,
    }
}

/// Simulates one round: each side projects, composes and sends its message
/// as bits, decodes the other's, and resolves its own feedback.
pub fn simulate_round_two_party(
    graph: &Graph,
    inst: &CutInstance,
    partitions: &[LocalPartition],
    beeps: &[Vec<LocalPin>],
) -> RoundExchange {
    let [pa, pb] = Side::BOTH.map(|s| project_classes(graph, inst, s, partitions));
    let la = local_beeps(graph, inst, &pa, beeps);
    let lb = local_beeps(graph, inst, &pb, beeps);
    let ma = SideMessage::compose(inst, &pa, &la);
    let mb = SideMessage::compose(inst, &pb, &lb);
    let (wire_a, wire_b) = (ma.to_bits(), mb.to_bits());
    let width = inst.name_width();
    let a = resolve(inst, &pa, &la, &ma, &SideMessage::from_bits(&wire_b, width));
    let b = resolve(inst, &pb, &lb, &mb, &SideMessage::from_bits(&wire_a, width));
    RoundExchange {
        a,
        b,
        bits_exchanged: wire_a.len() + wire_b.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub round: u64,
    pub node: usize,
    pub port: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoundBits {
    pub round: u64,
    pub cut_pins: usize,
    pub bits: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutReport {
    pub cut_pins: usize,
    pub name_width: u32,
    pub bound_per_round: usize,
    pub rounds: Vec<RoundBits>,
    pub mismatches: Vec<Mismatch>,
}

impl CutReport {
    pub fn within_bound(&self) -> bool {
        self.rounds.iter().all(|r| r.bits <= r.bound)
    }

    pub fn exact(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn max_bits(&self) -> usize {
        self.rounds.iter().map(|r| r.bits).max().unwrap_or(0)
    }
}

/// Replays a recorded run through the two-party protocol. Both parties
/// regenerate every node's random stream from `source`.
pub fn replay_trace<P: NodeProgram>(
    graph: &Graph,
    program: &P,
    inputs: &[P::Input],
    source: &dyn RandomSource,
    inst: &CutInstance,
    trace: &Trace,
) -> Result<CutReport, CutsimError> {
    let n = graph.n();
    let k = inst.k;
    if inputs.len() != n {
        return Err(EngineError::InputCount {
            expected: n,
            got: inputs.len(),
        }
        .into());
    }
    let mut rngs: Vec<_> = (0..n).map(|v| source.node_stream(v)).collect();
    let mut states: Vec<P::State> = (0..n)
        .map(|v| {
            let view = NodeView {
                degree: graph.degree(v),
                input: &inputs[v],
            };
            program.init(view, rngs[v].as_mut())
        })
        .collect();
    let mut partitions: Vec<LocalPartition> = (0..n)
        .map(|v| LocalPartition::singletons(graph.degree(v), k))
        .collect();
    let mut report = CutReport {
        cut_pins: inst.q.len(),
        name_width: inst.name_width(),
        bound_per_round: inst.bound_per_round(),
        rounds: Vec::with_capacity(trace.rounds.len()),
        mismatches: Vec::new(),
    };
    let mut beeps = vec![Vec::new(); n];
    for rec in &trace.rounds {
        if rec.nodes.len() != n {
            return Err(CutsimError::TraceShape {
                round: rec.round,
                expected: n,
                got: rec.nodes.len(),
            });
        }
        let halted: Vec<bool> = states.iter().map(|s| program.halted(s)).collect();
        for v in 0..n {
            let buf: &mut Vec<LocalPin> = &mut beeps[v];
            buf.clear();
            if !halted[v] {
                program.beep(&mut states[v], rngs[v].as_mut(), buf);
            }
            let mut sorted = buf.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted != rec.nodes[v].beeps {
                return Err(CutsimError::TraceCorruption {
                    round: rec.round,
                    node: v,
                });
            }
        }
        let ex = simulate_round_two_party(graph, inst, &partitions, &beeps);
        report.rounds.push(RoundBits {
            round: rec.round,
            cut_pins: inst.q.len(),
            bits: ex.bits_exchanged,
            bound: inst.bound_per_round(),
        });
        for v in 0..n {
            let out = ex.outcome(inst.side_of(v));
            let fb = out.feedback(graph, v);
            for (i, (&got, &want)) in fb.bits().iter().zip(&rec.nodes[v].feedback).enumerate() {
                if got != want {
                    report.mismatches.push(Mismatch {
                        round: rec.round,
                        node: v,
                        port: i / k,
                        index: i % k,
                    });
                }
            }
            if halted[v] {
                continue;
            }
            let next = program
                .step(&mut states[v], &fb, rngs[v].as_mut())
                .map_err(|source| EngineError::Program {
                    node: v,
                    round: rec.round,
                    source,
                })?;
            if let Some(p) = next {
                partitions[v] = p;
            }
        }
    }
    Ok(report)
}

/// Runs the engine for up to `rounds` rounds (fewer if every node halts)
/// and checks the two-party replay against it pin by pin.
pub fn verify_round_equivalence<P: NodeProgram>(
    graph: &Graph,
    program: &P,
    inputs: &[P::Input],
    source: &dyn RandomSource,
    inst: &CutInstance,
    rounds: u64,
) -> Result<CutReport, CutsimError> {
    let mut sim = Simulation::new(graph, program, inputs, source, TraceMode::Full)?;
    while sim.round() < rounds && !sim.all_halted() {
        sim.step_round()?;
    }
    let trace = sim
        .into_trace()
        .unwrap_or_else(|| Trace::new(program.pins()));
    replay_trace(graph, program, inputs, source, inst, &trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(9), 4);
    }

    #[test]
    fn message_bits_round_trip() {
        let m = SideMessage {
            width: 3,
            names: vec![0, 5, 7, 2],
            beeps: vec![true, false, false, true],
        };
        let bits = m.to_bits();
        assert_eq!(bits.len(), m.bit_len());
        assert_eq!(SideMessage::from_bits(&bits, 3), m);
    }

    #[test]
    fn parse_rejects_garbage() {
        let g = Graph::from_edges(3, 1, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(
            CutInstance::parse(&g, 1, "0 x"),
            Err(CutsimError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            CutInstance::parse(&g, 1, "# all\n0,1,2"),
            Err(CutsimError::EmptySide)
        ));
        let c = CutInstance::parse(&g, 1, "# a\n0, 1\n").unwrap();
        assert_eq!(c.cut_pins(), &[PinId { edge: 1, index: 0 }]);
    }
}
