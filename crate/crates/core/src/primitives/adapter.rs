use std::fmt;

use rand::RngCore;

use super::messaging::{decode, encode, sends_in, Orient, FRAME_ROUNDS};
use super::{
    composed_partition, Heard, Procedure, ProcedureFactory, Signals, Tick, CLUSTER_PIN, GLOBAL_PIN,
    MSG_PIN, PINS,
};
use crate::engine::{
    coin, Feedback, LocalPartition, LocalPin, NodeProgram, NodeView, ProgramError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Setup,
    OrientA,
    OrientB,
    Ticks,
    Done,
}

/// Node state of a [`GrcProgram`].
#[derive(Clone)]
pub struct GrcState<P> {
    proc: P,
    stage: Stage,
    uses_messages: bool,
    orientation: Vec<Orient>,
    heads: bool,
    heard_a: Vec<bool>,
    current: Option<Tick>,
    frame_round: usize,
    recv: Vec<[bool; 2]>,
    cluster: Vec<bool>,
    ticks: u64,
    error: Option<ProgramError>,
}

impl<P> GrcState<P> {
    pub fn procedure(&self) -> &P {
        &self.proc
    }

    pub fn orientation(&self) -> &[Orient] {
        &self.orientation
    }

    /// Completed ticks.
    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    fn degree(&self) -> usize {
        self.cluster.len()
    }

    fn first_cluster_port(&self) -> Option<usize> {
        self.cluster.iter().position(|&b| b)
    }
}

impl<P: fmt::Debug> fmt::Debug for GrcState<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} tick={}", self.stage, self.ticks)?;
        if let Some(Tick::Message(_)) = self.current {
            write!(f, " frame={}", self.frame_round)?;
        }
        write!(f, " {:?}", self.proc)
    }
}

/// Runs a [`Procedure`] on the engine.
#[derive(Debug, Clone)]
pub struct GrcProgram<F>(pub F);

impl<F> NodeProgram for GrcProgram<F>
where
    F: ProcedureFactory,
{
    type State = GrcState<F::Proc>;
    type Input = F::Input;
    type Output = <F::Proc as Procedure>::Output;

    fn pins(&self) -> usize {
        PINS
    }

    fn init(&self, view: NodeView<'_, Self::Input>, rng: &mut dyn RngCore) -> Self::State {
        let degree = view.degree;
        let proc = self.0.create(view, rng);
        GrcState {
            proc,
            stage: Stage::Setup,
            uses_messages: self.0.uses_messages(),
            orientation: vec![Orient::Unoriented; degree],
            heads: false,
            heard_a: vec![false; degree],
            current: None,
            frame_round: 0,
            recv: vec![[false; 2]; degree],
            cluster: vec![false; degree],
            ticks: 0,
            error: None,
        }
    }

    fn beep(&self, s: &mut Self::State, rng: &mut dyn RngCore, out: &mut Vec<LocalPin>) {
        let degree = s.degree();
        match s.stage {
            Stage::Setup | Stage::Done => {}
            Stage::OrientA => {
                let open: Vec<usize> = (0..degree)
                    .filter(|&p| s.orientation[p] == Orient::Unoriented)
                    .collect();
                if open.is_empty() {
                    return;
                }
                out.push(LocalPin::new(0, GLOBAL_PIN));
                s.heads = coin(rng);
                if s.heads {
                    out.extend(open.into_iter().map(|p| LocalPin::new(p, MSG_PIN)));
                }
            }
            Stage::OrientB => {
                for p in 0..degree {
                    if s.heard_a[p] {
                        s.orientation[p] = Orient::Out;
                        out.push(LocalPin::new(p, MSG_PIN));
                    }
                }
            }
            Stage::Ticks => {
                if s.current.is_none() {
                    match s.proc.tick(rng) {
                        Ok(t) => {
                            s.current = Some(t);
                            s.frame_round = 0;
                        }
                        Err(e) => {
                            s.error = Some(e);
                            return;
                        }
                    }
                }
                match s.current.as_ref() {
                    Some(Tick::Circuit(sig)) => {
                        if degree > 0 {
                            if sig.global {
                                out.push(LocalPin::new(0, GLOBAL_PIN));
                            }
                            if sig.aux {
                                out.push(LocalPin::new(0, MSG_PIN));
                            }
                        }
                        if sig.cluster {
                            if let Some(p) = s.first_cluster_port() {
                                out.push(LocalPin::new(p, CLUSTER_PIN));
                            }
                        }
                    }
                    Some(Tick::Message(msgs)) => {
                        if !s.uses_messages || msgs.len() != degree {
                            s.error = Some(ProgramError::Protocol(
                                "message tick without oriented message channels".into(),
                            ));
                            return;
                        }
                        let r = s.frame_round;
                        for (p, &m) in msgs.iter().enumerate() {
                            let o = s.orientation[p];
                            if sends_in(o, r) && encode(m)[r % 2] {
                                out.push(LocalPin::new(p, MSG_PIN));
                            }
                        }
                    }
                    None => {}
                }
            }
        }
    }

    fn step(
        &self,
        s: &mut Self::State,
        fb: &Feedback<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Option<LocalPartition>, ProgramError> {
        if let Some(e) = s.error.take() {
            return Err(e);
        }
        let degree = s.degree();
        match s.stage {
            Stage::Setup => {
                s.cluster = s.proc.cluster_ports().to_vec();
                if s.cluster.len() != degree {
                    return Err(ProgramError::Protocol(
                        "cluster port set has wrong length".into(),
                    ));
                }
                s.stage = if s.uses_messages {
                    Stage::OrientA
                } else {
                    Stage::Ticks
                };
                if s.stage == Stage::Ticks && s.proc.finished() {
                    s.stage = Stage::Done;
                }
                return Ok(Some(composed_partition(&s.cluster, !s.uses_messages)));
            }
            Stage::OrientA => {
                let global = degree > 0 && fb.get(LocalPin::new(0, GLOBAL_PIN));
                if !global {
                    s.proc.on_oriented(&s.orientation);
                    s.stage = if s.proc.finished() {
                        Stage::Done
                    } else {
                        Stage::Ticks
                    };
                    return Ok(None);
                }
                for p in 0..degree {
                    s.heard_a[p] = !s.heads
                        && s.orientation[p] == Orient::Unoriented
                        && fb.get(LocalPin::new(p, MSG_PIN));
                }
                s.stage = Stage::OrientB;
                return Ok(None);
            }
            Stage::OrientB => {
                if s.heads {
                    for p in 0..degree {
                        if s.orientation[p] == Orient::Unoriented
                            && fb.get(LocalPin::new(p, MSG_PIN))
                        {
                            s.orientation[p] = Orient::In;
                        }
                    }
                }
                s.heads = false;
                s.heard_a.iter_mut().for_each(|b| *b = false);
                s.stage = Stage::OrientA;
                return Ok(None);
            }
            Stage::Done => return Ok(None),
            Stage::Ticks => {}
        }

        let heard = match s.current.as_ref() {
            Some(Tick::Circuit(sig)) => {
                let global = if degree > 0 {
                    fb.get(LocalPin::new(0, GLOBAL_PIN))
                } else {
                    sig.global
                };
                let aux = if degree > 0 {
                    fb.get(LocalPin::new(0, MSG_PIN))
                } else {
                    sig.aux
                };
                let cluster = match s.first_cluster_port() {
                    Some(p) => fb.get(LocalPin::new(p, CLUSTER_PIN)),
                    None => sig.cluster,
                };
                Heard::Circuit(Signals {
                    global,
                    cluster,
                    aux,
                })
            }
            Some(Tick::Message(_)) => {
                let r = s.frame_round;
                for p in 0..degree {
                    let o = s.orientation[p];
                    if o != Orient::Unoriented && !sends_in(o, r) {
                        s.recv[p][r % 2] = fb.get(LocalPin::new(p, MSG_PIN));
                    }
                }
                if r + 1 < FRAME_ROUNDS {
                    s.frame_round += 1;
                    return Ok(None);
                }
                let decoded = s
                    .recv
                    .iter()
                    .map(|&code| decode(code))
                    .collect::<Result<Vec<_>, _>>()?;
                s.recv.iter_mut().for_each(|c| *c = [false; 2]);
                Heard::Message(decoded)
            }
            None => return Err(ProgramError::Protocol("no tick in progress".into())),
        };
        s.current = None;
        s.ticks += 1;
        s.proc.hear(&heard, rng)?;
        if s.proc.finished() {
            s.stage = Stage::Done;
        }
        if s.proc.cluster_ports() != s.cluster.as_slice() {
            s.cluster = s.proc.cluster_ports().to_vec();
            return Ok(Some(composed_partition(&s.cluster, !s.uses_messages)));
        }
        Ok(None)
    }

    fn halted(&self, s: &Self::State) -> bool {
        s.stage == Stage::Done
    }

    fn output(&self, s: &Self::State) -> Self::Output {
        s.proc.output()
    }
}
