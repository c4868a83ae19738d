use crate::engine::ProgramError;
use crate::primitives::{Heard, Tick};

/// Delayed BFS from a virtual root attached to every node `v` by an edge of
/// weight `w_v = kappa - delta_v`.
///
/// Runs `kappa` message ticks followed by one tick in which every member
/// tells its parent. A node reached in tick `r` with `r + 1 <= w_v` joins the
/// lowest-port sender and relays in tick `r + 1` to the ports it did not hear
/// from; an unreached node becomes a center and fires in tick `w_v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterBfs {
    kappa: u32,
    weight: u32,
    tick: u32,
    distance: Option<u32>,
    center: bool,
    parent: Option<usize>,
    fire_to: Vec<bool>,
    children: Vec<bool>,
    done: bool,
}

impl ClusterBfs {
    pub fn new(degree: usize, kappa: u32, delta: u32) -> Self {
        ClusterBfs {
            kappa,
            weight: kappa - delta,
            tick: 0,
            distance: None,
            center: false,
            parent: None,
            fire_to: vec![true; degree],
            children: vec![false; degree],
            done: false,
        }
    }

    pub fn tick(&mut self) -> Tick {
        self.tick += 1;
        let r = self.tick;
        let degree = self.fire_to.len();
        if r > self.kappa {
            let mut msgs = vec![None; degree];
            if let Some(p) = self.parent {
                msgs[p] = Some(true);
            }
            return Tick::Message(msgs);
        }
        if self.distance.is_none() && r == self.weight {
            self.distance = Some(r);
            self.center = true;
        }
        let fires = self.distance == Some(r);
        Tick::Message(
            self.fire_to
                .iter()
                .map(|&f| (fires && f).then_some(true))
                .collect(),
        )
    }

    pub fn hear(&mut self, heard: &Heard) -> Result<(), ProgramError> {
        let msgs = heard.messages()?;
        let r = self.tick;
        if r > self.kappa {
            for (child, m) in self.children.iter_mut().zip(msgs) {
                *child = m.is_some();
            }
            self.done = true;
            return Ok(());
        }
        if self.distance.is_none() && r < self.weight {
            if let Some(first) = msgs.iter().position(|m| m.is_some()) {
                self.distance = Some(r + 1);
                self.parent = Some(first);
                for (f, m) in self.fire_to.iter_mut().zip(msgs) {
                    *f = m.is_none();
                }
            }
        }
        Ok(())
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn center(&self) -> bool {
        self.center
    }

    pub fn parent(&self) -> Option<usize> {
        self.parent
    }

    /// Distance from the virtual root.
    pub fn distance(&self) -> Option<u32> {
        self.distance
    }

    /// Parent and child ports.
    pub fn tree_ports(&self) -> Vec<bool> {
        let mut t = self.children.clone();
        if let Some(p) = self.parent {
            t[p] = true;
        }
        t
    }
}
