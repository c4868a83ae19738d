use rand::RngCore;

use super::counting::RepeatedCounting;
use super::Signals;
use crate::engine::coin;

/// Beep tournament on the cluster circuit, paced by `c` counting executions
/// on the global circuit.
///
/// Each active candidate beeps on heads; a silent candidate that hears a
/// beep withdraws. A round in which every candidate is silent eliminates
/// nobody, so at least one candidate survives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaderElection {
    active: bool,
    beeped: bool,
    pacing: RepeatedCounting,
}

impl LeaderElection {
    pub fn new(candidate: bool, c: u32) -> Self {
        LeaderElection {
            active: candidate,
            beeped: false,
            pacing: RepeatedCounting::new(c),
        }
    }

    pub fn tick(&mut self, rng: &mut dyn RngCore) -> Signals {
        let global = self.pacing.signal(rng);
        self.beeped = self.active && coin(rng);
        Signals {
            global,
            cluster: self.beeped,
            aux: false,
        }
    }

    pub fn hear(&mut self, heard: Signals) {
        if self.active && !self.beeped && heard.cluster {
            self.active = false;
        }
        self.pacing.observe(heard.global);
    }

    pub fn done(&self) -> bool {
        self.pacing.done()
    }

    pub fn leader(&self) -> bool {
        self.active
    }
}
