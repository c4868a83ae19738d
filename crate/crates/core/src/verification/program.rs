use rand::RngCore;

use crate::engine::{coin, NodeView, ProgramError};
use crate::mst::MstMachine;
use crate::primitives::{
    Heard, OutgoingDetection, Procedure, ProcedureFactory, RepeatedCounting, Signals, Tick,
};

use super::Task;

/// Local view of a verification instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyInput {
    /// `E_H(v)` per port.
    pub h_ports: Vec<bool>,
    pub s: bool,
    pub t: bool,
    /// Port of the distinguished edge, at its endpoints.
    pub marked_port: Option<usize>,
    /// Edge weights per port; only used for MST verification.
    pub weights: Vec<u64>,
}

/// What a step contributes: a beep heard on the relevant channel ends the
/// run with `on_heard`, silence with `on_silent`; `None` moves on.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Outcome {
    on_heard: Option<bool>,
    on_silent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    /// One round on the global circuit.
    Beep(bool),
    /// Outgoing-edge detection over `cluster`, then a report round by nodes
    /// that found an outgoing edge (or the watched one).
    Detect {
        cluster: Vec<bool>,
        participant: bool,
        watch: Watch,
    },
    /// Whether more than one cluster leader exists, judged from the leaders
    /// of the preceding detection.
    SeveralLeaders,
    /// `s` beeps random bits on its component circuit; `t` reports hearing
    /// one on the second global circuit.
    Probe {
        component: Vec<bool>,
        s: bool,
        t: bool,
    },
    /// MST construction under the given weights, then a report round by
    /// nodes whose tree ports differ from `E_H(v)`.
    Mst { weights: Vec<u64>, h: Vec<bool> },
}

/// Which detected edges a node reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Watch {
    Any,
    /// Only the distinguished edge, at its endpoints.
    Marked(Option<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Step {
    kind: Kind,
    outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Run {
    Idle,
    Beep(bool),
    Detect(OutgoingDetection),
    Report(bool),
    Leaders {
        pacing: RepeatedCounting,
        phase: u8,
        bit: bool,
        heard: [bool; 2],
    },
    Probe {
        pacing: RepeatedCounting,
        found: bool,
        heard: bool,
        reporting: bool,
    },
    Mst(Box<MstMachine>),
}

/// Runs a task's steps in order until one decides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyMachine {
    c: u32,
    degree: usize,
    steps: Vec<Step>,
    next: usize,
    run: Run,
    cluster: Vec<bool>,
    leader: bool,
    fallback: bool,
    verdict: Option<bool>,
}

fn not(bits: &[bool]) -> Vec<bool> {
    bits.iter().map(|b| !b).collect()
}

fn steps_for(task: Task, input: &VerifyInput, degree: usize) -> (Vec<Step>, bool) {
    let h = &input.h_ports;
    let deg_h = h.iter().filter(|&&b| b).count();
    let in_vh = deg_h > 0;
    let marked_missing = input.marked_port.is_some_and(|p| !h[p]);
    let without_marked = {
        let mut x = h.clone();
        if let Some(p) = input.marked_port {
            x[p] = false;
        }
        x
    };
    let step = |kind, on_heard, on_silent| Step {
        kind,
        outcome: Outcome {
            on_heard,
            on_silent,
        },
    };
    let detect = |cluster: Vec<bool>, participant, watch, on_heard| {
        step(
            Kind::Detect {
                cluster,
                participant,
                watch,
            },
            on_heard,
            None,
        )
    };
    let several = |on_heard| step(Kind::SeveralLeaders, on_heard, None);
    match task {
        Task::Mst => {
            let weights = input
                .weights
                .iter()
                .zip(h)
                .map(|(&w, &in_h)| if in_h { 2 * w - 1 } else { 2 * w })
                .collect();
            (
                vec![step(
                    Kind::Mst {
                        weights,
                        h: h.clone(),
                    },
                    Some(false),
                    None,
                )],
                true,
            )
        }
        Task::ConnectedSpanning => (
            vec![
                step(Kind::Beep(degree > 0 && !in_vh), Some(false), None),
                detect(h.clone(), true, Watch::Any, Some(false)),
            ],
            true,
        ),
        Task::ECycle => (
            vec![
                step(Kind::Beep(marked_missing), Some(false), None),
                detect(
                    without_marked,
                    true,
                    Watch::Marked(input.marked_port),
                    Some(false),
                ),
            ],
            true,
        ),
        Task::EdgeOnAllPaths => (
            vec![
                step(Kind::Beep(marked_missing), Some(false), None),
                detect(
                    without_marked,
                    true,
                    Watch::Marked(input.marked_port),
                    Some(true),
                ),
            ],
            false,
        ),
        Task::StConnectivity => (
            vec![step(
                Kind::Probe {
                    component: h.clone(),
                    s: input.s,
                    t: input.t,
                },
                Some(true),
                None,
            )],
            false,
        ),
        Task::StCut => (
            vec![step(
                Kind::Probe {
                    component: not(h),
                    s: input.s,
                    t: input.t,
                },
                Some(false),
                None,
            )],
            true,
        ),
        Task::Connectivity => (
            vec![
                detect(h.clone(), in_vh, Watch::Any, Some(false)),
                several(Some(false)),
            ],
            true,
        ),
        Task::Cut => (
            vec![
                detect(not(h), true, Watch::Any, Some(true)),
                several(Some(true)),
            ],
            false,
        ),
        Task::HamiltonianCycle => (
            vec![
                step(Kind::Beep(deg_h != 2), Some(false), None),
                detect(h.clone(), true, Watch::Any, Some(false)),
            ],
            true,
        ),
        Task::SimplePath => (
            vec![
                step(Kind::Beep(deg_h > 2), Some(false), None),
                step(Kind::Beep(deg_h == 1), None, Some(false)),
                detect(h.clone(), in_vh, Watch::Any, Some(false)),
                several(Some(false)),
            ],
            true,
        ),
    }
}

impl VerifyMachine {
    pub fn new(task: Task, input: &VerifyInput, degree: usize, c: u32) -> Self {
        let (steps, fallback) = steps_for(task, input, degree);
        let mut m = VerifyMachine {
            c,
            degree,
            steps,
            next: 0,
            run: Run::Idle,
            cluster: vec![false; degree],
            leader: false,
            fallback,
            verdict: None,
        };
        m.advance();
        m
    }

    fn advance(&mut self) {
        let Some(step) = self.steps.get(self.next) else {
            self.verdict = Some(self.fallback);
            self.run = Run::Idle;
            return;
        };
        self.run = match &step.kind {
            Kind::Beep(b) => Run::Beep(*b),
            Kind::Detect {
                cluster,
                participant,
                ..
            } => {
                self.cluster = cluster.clone();
                Run::Detect(OutgoingDetection::new(self.degree, *participant, self.c))
            }
            Kind::SeveralLeaders => Run::Leaders {
                pacing: RepeatedCounting::new(self.c),
                phase: 0,
                bit: false,
                heard: [false; 2],
            },
            Kind::Probe { component, s, t } => {
                self.cluster = component.clone();
                Run::Probe {
                    pacing: RepeatedCounting::new(self.c),
                    found: *s && *t,
                    heard: false,
                    reporting: false,
                }
            }
            Kind::Mst { weights, .. } => {
                Run::Mst(Box::new(MstMachine::new(weights.clone(), self.c)))
            }
        };
    }

    /// Applies the current step's outcome and moves on if undecided.
    fn conclude(&mut self, heard: bool) {
        let o = &self.steps[self.next].outcome;
        let decided = if heard { o.on_heard } else { o.on_silent };
        match decided {
            Some(v) => {
                self.verdict = Some(v);
                self.run = Run::Idle;
            }
            None => {
                self.next += 1;
                self.advance();
            }
        }
    }

    pub fn cluster_ports(&self) -> &[bool] {
        match &self.run {
            Run::Mst(m) => m.tree_ports(),
            _ => &self.cluster,
        }
    }

    pub fn verdict(&self) -> Option<bool> {
        self.verdict
    }

    pub fn tick(&mut self, rng: &mut dyn RngCore) -> Tick {
        match &mut self.run {
            Run::Idle => Tick::idle(),
            Run::Beep(b) | Run::Report(b) => Tick::Circuit(Signals::global(*b)),
            Run::Detect(d) => d.tick(rng),
            Run::Leaders {
                pacing, phase, bit, ..
            } => {
                let global = match *phase {
                    0 => pacing.signal(rng),
                    1 => {
                        *bit = coin(rng);
                        self.leader && *bit
                    }
                    _ => self.leader && !*bit,
                };
                Tick::Circuit(Signals::global(global))
            }
            Run::Probe {
                pacing,
                found,
                reporting,
                ..
            } => {
                let step = &self.steps[self.next].kind;
                let (s, t) = match step {
                    Kind::Probe { s, t, .. } => (*s, *t),
                    _ => (false, false),
                };
                let global = if *reporting {
                    false
                } else {
                    pacing.signal(rng)
                };
                let cluster = !*reporting && s && coin(rng);
                Tick::Circuit(Signals {
                    global,
                    cluster,
                    aux: t && *found,
                })
            }
            Run::Mst(m) => m.tick(rng),
        }
    }

    pub fn hear(&mut self, heard: &Heard) -> Result<(), ProgramError> {
        match &mut self.run {
            Run::Idle => {}
            Run::Beep(_) | Run::Report(_) => {
                let g = heard.signals()?.global;
                self.conclude(g);
            }
            Run::Detect(d) => {
                d.hear(heard)?;
                if d.done() {
                    self.leader = d.leader();
                    let bad = d.participant()
                        && match &self.steps[self.next].kind {
                            Kind::Detect {
                                watch: Watch::Marked(p),
                                ..
                            } => p.is_some_and(|p| d.outgoing()[p]),
                            _ => d.outgoing().iter().any(|&b| b),
                        };
                    self.run = Run::Report(bad);
                }
            }
            Run::Leaders {
                pacing,
                phase,
                heard: both,
                ..
            } => {
                let g = heard.signals()?.global;
                match *phase {
                    0 => {
                        pacing.observe(g);
                        *phase = 1;
                    }
                    1 => {
                        both[0] = g;
                        *phase = 2;
                    }
                    _ => {
                        both[1] = g;
                        *phase = 0;
                        if both[0] && both[1] {
                            self.conclude(true);
                        } else if pacing.done() {
                            self.conclude(false);
                        }
                    }
                }
            }
            Run::Probe {
                pacing,
                found,
                heard: any,
                reporting,
            } => {
                let sig = heard.signals()?;
                let t = matches!(
                    self.steps[self.next].kind,
                    Kind::Probe {
                        t: true,
                        s: false,
                        ..
                    }
                );
                if t && sig.cluster {
                    *found = true;
                }
                *any |= sig.aux;
                if *reporting {
                    let any = *any;
                    self.conclude(any);
                } else {
                    pacing.observe(sig.global);
                    if *any {
                        self.conclude(true);
                    } else if pacing.done() {
                        *reporting = true;
                    }
                }
            }
            Run::Mst(m) => {
                m.hear(heard)?;
                if m.done() {
                    let bad = match &self.steps[self.next].kind {
                        Kind::Mst { h, .. } => m.tree_ports() != h.as_slice(),
                        _ => false,
                    };
                    self.cluster = m.tree_ports().to_vec();
                    self.run = Run::Report(bad);
                }
            }
        }
        Ok(())
    }
}

/// Factory for the verification programs.
#[derive(Debug, Clone, Copy)]
pub struct Verify {
    pub task: Task,
    pub c: u32,
}

#[derive(Debug, Clone)]
pub struct VerifyProc(VerifyMachine);

impl ProcedureFactory for Verify {
    type Input = VerifyInput;
    type Proc = VerifyProc;

    fn uses_messages(&self) -> bool {
        !matches!(self.task, Task::StConnectivity | Task::StCut)
    }

    fn create(&self, view: NodeView<'_, VerifyInput>, _rng: &mut dyn RngCore) -> VerifyProc {
        VerifyProc(VerifyMachine::new(
            self.task,
            view.input,
            view.degree,
            self.c,
        ))
    }
}

impl Procedure for VerifyProc {
    type Output = Option<bool>;

    fn cluster_ports(&self) -> &[bool] {
        self.0.cluster_ports()
    }

    fn tick(&mut self, rng: &mut dyn RngCore) -> Result<Tick, ProgramError> {
        Ok(self.0.tick(rng))
    }

    fn hear(&mut self, heard: &Heard, _rng: &mut dyn RngCore) -> Result<(), ProgramError> {
        self.0.hear(heard)
    }

    fn finished(&self) -> bool {
        self.0.verdict().is_some()
    }

    fn output(&self) -> Option<bool> {
        self.0.verdict()
    }
}
