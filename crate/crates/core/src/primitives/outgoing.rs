use rand::RngCore;

use super::counting::RepeatedCounting;
use super::leader::LeaderElection;
use super::{Heard, Signals, Tick};
use crate::engine::{coin, ProgramError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Stage {
    Elect(LeaderElection),
    Broadcast,
    Forward,
    Done,
}

/// Classifies incident edges as outgoing with respect to the clusters formed
/// by the current cluster circuit.
///
/// Cluster leaders broadcast random bits on the cluster circuit; every node
/// forwards each bit to all neighbours, and a port whose received bit ever
/// differs from the local one is outgoing. Broadcasting continues until `c`
/// counting executions have completed. Non-participants send "no message"
/// and are ignored by their neighbours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutgoingDetection {
    participant: bool,
    c: u32,
    stage: Stage,
    leader: bool,
    pacing: RepeatedCounting,
    bit: bool,
    outgoing: Vec<bool>,
    bits_sent: u32,
}

impl OutgoingDetection {
    pub fn new(degree: usize, participant: bool, c: u32) -> Self {
        OutgoingDetection {
            participant,
            c,
            stage: Stage::Elect(LeaderElection::new(participant, c)),
            leader: false,
            pacing: RepeatedCounting::new(c),
            bit: false,
            outgoing: vec![false; degree],
            bits_sent: 0,
        }
    }

    pub fn tick(&mut self, rng: &mut dyn RngCore) -> Tick {
        match &mut self.stage {
            Stage::Elect(e) => Tick::Circuit(e.tick(rng)),
            Stage::Broadcast => {
                let global = self.pacing.signal(rng);
                let cluster = self.leader && coin(rng);
                Tick::Circuit(Signals {
                    global,
                    cluster,
                    aux: false,
                })
            }
            Stage::Forward => {
                let msg = self.participant.then_some(self.bit);
                Tick::Message(vec![msg; self.outgoing.len()])
            }
            Stage::Done => Tick::idle(),
        }
    }

    pub fn hear(&mut self, heard: &Heard) -> Result<(), ProgramError> {
        match (&mut self.stage, heard) {
            (Stage::Elect(e), Heard::Circuit(s)) => {
                e.hear(*s);
                if e.done() {
                    self.leader = e.leader();
                    self.pacing = RepeatedCounting::new(self.c);
                    self.stage = Stage::Broadcast;
                }
            }
            (Stage::Broadcast, Heard::Circuit(s)) => {
                self.bit = s.cluster;
                self.pacing.observe(s.global);
                self.stage = Stage::Forward;
            }
            (Stage::Forward, Heard::Message(msgs)) => {
                self.bits_sent += 1;
                if self.participant {
                    for (out, m) in self.outgoing.iter_mut().zip(msgs) {
                        if let Some(b) = m {
                            if *b != self.bit {
                                *out = true;
                            }
                        }
                    }
                }
                self.stage = if self.pacing.done() {
                    Stage::Done
                } else {
                    Stage::Broadcast
                };
            }
            (Stage::Done, _) => {}
            _ => {
                return Err(ProgramError::Protocol(
                    "tick kind mismatch in outgoing detection".into(),
                ))
            }
        }
        Ok(())
    }

    pub fn done(&self) -> bool {
        self.stage == Stage::Done
    }

    pub fn leader(&self) -> bool {
        self.leader
    }

    pub fn participant(&self) -> bool {
        self.participant
    }

    /// Per port; only meaningful for participants.
    pub fn outgoing(&self) -> &[bool] {
        &self.outgoing
    }

    pub fn into_outgoing(self) -> Vec<bool> {
        self.outgoing
    }

    /// Number of broadcast bits exchanged.
    pub fn bits_sent(&self) -> u32 {
        self.bits_sent
    }
}
