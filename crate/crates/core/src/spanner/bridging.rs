use rand::RngCore;

use crate::engine::{coin, ProgramError};
use crate::primitives::{Heard, RepeatedCounting, Signals, Tick};

/// Classification of a neighbour by its cluster ID prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortClass {
    /// Same ID bits so far.
    Eq,
    /// Smaller ID; neighbours in the same group share all ID bits so far.
    Smaller(u32),
    Larger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Broadcast,
    Forward,
    Done,
}

/// Draws random cluster IDs bit by bit and keeps one edge towards every
/// neighbouring cluster with a smaller ID.
///
/// Each iteration the center tosses a coin and beeps it on the cluster
/// circuit, then every node forwards the heard bit to all neighbours.
/// Iterations run until `executions` counting runs complete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bridging {
    center: bool,
    bit: bool,
    classes: Vec<PortClass>,
    pacing: RepeatedCounting,
    step: Step,
    iterations: u32,
}

impl Bridging {
    pub fn new(degree: usize, center: bool, executions: u32) -> Self {
        Bridging {
            center,
            bit: false,
            classes: vec![PortClass::Eq; degree],
            pacing: RepeatedCounting::new(executions),
            step: Step::Broadcast,
            iterations: 0,
        }
    }

    pub fn tick(&mut self, rng: &mut dyn RngCore) -> Tick {
        match self.step {
            Step::Broadcast => {
                let global = self.pacing.signal(rng);
                let cluster = self.center && coin(rng);
                Tick::Circuit(Signals {
                    global,
                    cluster,
                    aux: false,
                })
            }
            Step::Forward => Tick::Message(vec![Some(self.bit); self.classes.len()]),
            Step::Done => Tick::idle(),
        }
    }

    pub fn hear(&mut self, heard: &Heard) -> Result<(), ProgramError> {
        match self.step {
            Step::Broadcast => {
                let s = heard.signals()?;
                self.bit = s.cluster;
                self.pacing.observe(s.global);
                self.step = Step::Forward;
            }
            Step::Forward => {
                let msgs = heard.messages()?;
                self.refine(msgs)?;
                self.iterations += 1;
                self.step = if self.pacing.done() {
                    Step::Done
                } else {
                    Step::Broadcast
                };
            }
            Step::Done => {}
        }
        Ok(())
    }

    fn refine(&mut self, msgs: &[Option<bool>]) -> Result<(), ProgramError> {
        const NEW: u32 = u32::MAX;
        let mut keys: Vec<(u32, bool)> = Vec::new();
        let mut relabel = |key: (u32, bool)| -> u32 {
            match keys.iter().position(|&k| k == key) {
                Some(i) => i as u32,
                None => {
                    keys.push(key);
                    (keys.len() - 1) as u32
                }
            }
        };
        for (class, m) in self.classes.iter_mut().zip(msgs) {
            let b = m.ok_or_else(|| ProgramError::Protocol("missing cluster ID bit".into()))?;
            *class = match *class {
                PortClass::Eq if b == self.bit => PortClass::Eq,
                PortClass::Eq if !b => PortClass::Smaller(relabel((NEW, false))),
                PortClass::Eq => PortClass::Larger,
                PortClass::Smaller(g) => PortClass::Smaller(relabel((g, b))),
                PortClass::Larger => PortClass::Larger,
            };
        }
        Ok(())
    }

    pub fn done(&self) -> bool {
        self.step == Step::Done
    }

    pub fn classes(&self) -> &[PortClass] {
        &self.classes
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    /// The lowest port of every smaller-ID group.
    pub fn bridge_ports(&self) -> Vec<bool> {
        let mut seen: Vec<u32> = Vec::new();
        self.classes
            .iter()
            .map(|c| match c {
                PortClass::Smaller(g) if !seen.contains(g) => {
                    seen.push(*g);
                    true
                }
                _ => false,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feed(b: &mut Bridging, own: bool, msgs: &[bool]) {
        b.bit = own;
        b.step = Step::Forward;
        let m: Vec<Option<bool>> = msgs.iter().map(|&x| Some(x)).collect();
        b.refine(&m).unwrap();
    }

    #[test]
    fn higher_id_bridges_to_lower() {
        let mut b = Bridging::new(1, true, 1);
        feed(&mut b, true, &[false]);
        assert_eq!(b.bridge_ports(), vec![true]);
        let mut other = Bridging::new(1, true, 1);
        feed(&mut other, false, &[true]);
        assert_eq!(other.bridge_ports(), vec![false]);
    }

    #[test]
    fn groups_split_on_later_bits() {
        let mut b = Bridging::new(4, false, 1);
        feed(&mut b, true, &[false, false, false, true]);
        feed(&mut b, false, &[true, true, false, false]);
        feed(&mut b, true, &[true, false, false, true]);
        assert_eq!(
            b.classes(),
            &[
                PortClass::Smaller(0),
                PortClass::Smaller(1),
                PortClass::Smaller(2),
                PortClass::Eq
            ]
        );
        assert_eq!(b.bridge_ports(), vec![true, true, true, false]);
    }

    #[test]
    fn same_cluster_stays_equal() {
        let mut b = Bridging::new(2, false, 1);
        for bit in [true, false, false, true] {
            feed(&mut b, bit, &[bit, bit]);
        }
        assert_eq!(b.classes(), &[PortClass::Eq, PortClass::Eq]);
        assert_eq!(b.bridge_ports(), vec![false, false]);
    }
}
