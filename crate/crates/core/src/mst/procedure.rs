use rand::RngCore;

use super::lightest::Lightest;
use super::selection::Selection;
use crate::engine::{NodeView, ProgramError};
use crate::primitives::{Heard, OutgoingDetection, Procedure, ProcedureFactory, Signals, Tick};

/// A candidate edge that survived selection at this node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selected {
    pub phase: u32,
    pub port: usize,
    pub weight: u64,
    pub bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MstOutput {
    /// `T(v)` per port.
    pub tree_ports: Vec<bool>,
    /// Phase in which each tree port was added.
    pub added_in_phase: Vec<Option<u32>>,
    /// Phases that ran a full merge step.
    pub phases: u32,
    pub selections: Vec<Selected>,
    /// Detected `Out(v)` per phase, including the final terminating one.
    pub out_history: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Stage {
    Detect(OutgoingDetection),
    Terminate,
    Lightest(Lightest),
    Inform,
    Select(Selection),
    Commit,
    Done,
}

/// Boruvka-style MST construction as a tick-level state machine.
///
/// Per phase: outgoing-edge detection on the current tree, a termination
/// check (silence on the global circuit when no node has an outgoing edge),
/// lightest-candidate filtering, informing the far endpoints of candidate
/// edges, random tie-breaking, and marking the surviving edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MstMachine {
    weights: Vec<u64>,
    c: u32,
    tree: Vec<bool>,
    added: Vec<Option<u32>>,
    phase: u32,
    out: Vec<bool>,
    /// Every minimal-weight outgoing port.
    candidates: Vec<usize>,
    stage: Stage,
    selections: Vec<Selected>,
    out_history: Vec<Vec<bool>>,
}

impl MstMachine {
    pub fn new(weights: Vec<u64>, c: u32) -> Self {
        let degree = weights.len();
        MstMachine {
            c,
            tree: vec![false; degree],
            added: vec![None; degree],
            phase: 0,
            out: vec![false; degree],
            candidates: Vec::new(),
            stage: Stage::Detect(OutgoingDetection::new(degree, true, c)),
            selections: Vec::new(),
            out_history: Vec::new(),
            weights,
        }
    }

    pub fn tree_ports(&self) -> &[bool] {
        &self.tree
    }

    pub fn done(&self) -> bool {
        self.stage == Stage::Done
    }

    pub fn tick(&mut self, rng: &mut dyn RngCore) -> Tick {
        let degree = self.tree.len();
        match &mut self.stage {
            Stage::Detect(d) => d.tick(rng),
            Stage::Terminate => Tick::Circuit(Signals::global(self.out.iter().any(|&b| b))),
            Stage::Lightest(l) => Tick::Circuit(l.tick()),
            Stage::Inform | Stage::Commit => {
                let mut msgs = vec![None; degree];
                for &p in &self.candidates {
                    msgs[p] = Some(true);
                }
                Tick::Message(msgs)
            }
            Stage::Select(s) => s.tick(rng),
            Stage::Done => Tick::idle(),
        }
    }

    pub fn hear(&mut self, heard: &Heard) -> Result<(), ProgramError> {
        match &mut self.stage {
            Stage::Detect(d) => {
                d.hear(heard)?;
                if d.done() {
                    self.out = d.outgoing().to_vec();
                    self.out_history.push(self.out.clone());
                    self.stage = Stage::Terminate;
                }
            }
            Stage::Terminate => {
                if !heard.signals()?.global {
                    self.stage = Stage::Done;
                    return Ok(());
                }
                let w = (0..self.out.len())
                    .filter(|&p| self.out[p])
                    .map(|p| self.weights[p])
                    .min();
                self.candidates = (0..self.out.len())
                    .filter(|&p| self.out[p] && Some(self.weights[p]) == w)
                    .collect();
                self.stage = Stage::Lightest(Lightest::new(w));
            }
            Stage::Lightest(l) => {
                l.hear(heard.signals()?);
                if l.done() {
                    if !l.marked() {
                        self.candidates.clear();
                    }
                    self.stage = Stage::Inform;
                }
            }
            Stage::Inform => {
                let msgs = heard.messages()?;
                let mut participating: Vec<bool> = msgs.iter().map(|m| m.is_some()).collect();
                for &p in &self.candidates {
                    participating[p] = true;
                }
                self.stage = Stage::Select(Selection::new(&self.candidates, participating, self.c));
            }
            Stage::Select(s) => {
                s.hear(heard)?;
                if s.done() {
                    self.candidates = s.survivors();
                    for &port in &self.candidates {
                        self.selections.push(Selected {
                            phase: self.phase,
                            port,
                            weight: self.weights[port],
                            bits: s.bits(port).to_vec(),
                        });
                    }
                    self.stage = Stage::Commit;
                }
            }
            Stage::Commit => {
                let msgs = heard.messages()?;
                for p in 0..self.tree.len() {
                    if (self.candidates.contains(&p) || msgs[p].is_some()) && !self.tree[p] {
                        self.tree[p] = true;
                        self.added[p] = Some(self.phase);
                    }
                }
                self.candidates.clear();
                self.phase += 1;
                self.stage = Stage::Detect(OutgoingDetection::new(self.tree.len(), true, self.c));
            }
            Stage::Done => {}
        }
        Ok(())
    }

    pub fn output(&self) -> MstOutput {
        MstOutput {
            tree_ports: self.tree.clone(),
            added_in_phase: self.added.clone(),
            phases: self.phase,
            selections: self.selections.clone(),
            out_history: self.out_history.clone(),
        }
    }
}

/// Factory for the standalone MST program; node input is the weight of
/// each port's edge.
#[derive(Debug, Clone, Copy)]
pub struct Mst {
    pub c: u32,
}

#[derive(Debug, Clone)]
pub struct MstProc(MstMachine);

impl ProcedureFactory for Mst {
    type Input = Vec<u64>;
    type Proc = MstProc;

    fn uses_messages(&self) -> bool {
        true
    }

    fn create(&self, view: NodeView<'_, Vec<u64>>, _rng: &mut dyn RngCore) -> MstProc {
        MstProc(MstMachine::new(view.input.clone(), self.c))
    }
}

impl Procedure for MstProc {
    type Output = MstOutput;

    fn cluster_ports(&self) -> &[bool] {
        self.0.tree_ports()
    }

    fn tick(&mut self, rng: &mut dyn RngCore) -> Result<Tick, ProgramError> {
        Ok(self.0.tick(rng))
    }

    fn hear(&mut self, heard: &Heard, _rng: &mut dyn RngCore) -> Result<(), ProgramError> {
        self.0.hear(heard)
    }

    fn finished(&self) -> bool {
        self.0.done()
    }

    fn output(&self) -> MstOutput {
        self.0.output()
    }
}
