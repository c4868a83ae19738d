use rand::RngCore;

use crate::engine::{coin, ProgramError};
use crate::primitives::{Heard, RepeatedCounting, Signals, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Exchange,
    Compare,
    Done,
}

/// Breaks ties among equally light candidates of a cluster.
///
/// Each iteration, both endpoints of every candidate edge send each other a
/// random bit over that edge. A node beeps on the cluster circuit iff one of
/// its marked candidates has XOR 1; once the circuit carries a beep, every
/// marked candidate with XOR 0 is unmarked. The XOR bits, first drawn most
/// significant, form the edge's selection bits, which both endpoints see
/// identically. Iterations continue until `c` counting executions complete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    /// Marked flag per port; `None` for ports that are not candidates here.
    marked: Vec<Option<bool>>,
    participating: Vec<bool>,
    sent: Vec<bool>,
    xor: Vec<bool>,
    bits: Vec<Vec<bool>>,
    pacing: RepeatedCounting,
    step: Step,
}

impl Selection {
    /// `participating` marks ports that carry a candidate edge of either
    /// endpoint, including every port in `candidates`.
    pub fn new(candidates: &[usize], participating: Vec<bool>, c: u32) -> Self {
        let degree = participating.len();
        let mut marked = vec![None; degree];
        for &p in candidates {
            marked[p] = Some(true);
        }
        Selection {
            marked,
            participating,
            sent: vec![false; degree],
            xor: vec![false; degree],
            bits: vec![Vec::new(); degree],
            pacing: RepeatedCounting::new(c),
            step: Step::Exchange,
        }
    }

    fn beeping(&self) -> bool {
        self.marked
            .iter()
            .zip(&self.xor)
            .any(|(m, &x)| *m == Some(true) && x)
    }

    pub fn tick(&mut self, rng: &mut dyn RngCore) -> Tick {
        match self.step {
            Step::Exchange => {
                let msgs = self
                    .participating
                    .iter()
                    .zip(self.sent.iter_mut())
                    .map(|(&p, sent)| {
                        if p {
                            *sent = coin(rng);
                            Some(*sent)
                        } else {
                            None
                        }
                    })
                    .collect();
                Tick::Message(msgs)
            }
            Step::Compare => {
                let global = self.pacing.signal(rng);
                Tick::Circuit(Signals {
                    global,
                    cluster: self.beeping(),
                    aux: false,
                })
            }
            Step::Done => Tick::idle(),
        }
    }

    pub fn hear(&mut self, heard: &Heard) -> Result<(), ProgramError> {
        match self.step {
            Step::Exchange => {
                let msgs = heard.messages()?;
                for port in 0..self.marked.len() {
                    if self.marked[port].is_none() {
                        continue;
                    }
                    let theirs = msgs[port].ok_or_else(|| {
                        ProgramError::Protocol("candidate partner sent no selection bit".into())
                    })?;
                    self.xor[port] = self.sent[port] ^ theirs;
                    self.bits[port].push(self.xor[port]);
                }
                self.step = Step::Compare;
            }
            Step::Compare => {
                let s = heard.signals()?;
                if s.cluster {
                    for (m, &x) in self.marked.iter_mut().zip(&self.xor) {
                        if *m == Some(true) && !x {
                            *m = Some(false);
                        }
                    }
                }
                self.pacing.observe(s.global);
                self.step = if self.pacing.done() {
                    Step::Done
                } else {
                    Step::Exchange
                };
            }
            Step::Done => {}
        }
        Ok(())
    }

    pub fn done(&self) -> bool {
        self.step == Step::Done
    }

    /// Candidate ports still marked.
    pub fn survivors(&self) -> Vec<usize> {
        (0..self.marked.len())
            .filter(|&p| self.marked[p] == Some(true))
            .collect()
    }

    /// Selection bits drawn on `port`; empty for non-candidates.
    pub fn bits(&self, port: usize) -> &[bool] {
        &self.bits[port]
    }
}
