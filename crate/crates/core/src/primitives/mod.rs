//! Building blocks shared by the composed algorithms.
//!
//! Composed algorithms use three pins per edge:
//!
//! * pin index 0 ([`MSG_PIN`]): per-edge singleton circuits for bit messages,
//!   or a second global circuit for programs that send no messages;
//! * pin index 1 ([`GLOBAL_PIN`]): the global circuit;
//! * pin index 2 ([`CLUSTER_PIN`]): cluster circuits over a chosen port set.
//!
//! Algorithms are written as [`Procedure`]s that advance in ticks. A circuit
//! tick is one round with one beep decision per channel; a message tick is a
//! four-round frame carrying at most one bit per port and direction.
//! [`GrcProgram`] turns a procedure into a [`NodeProgram`]: a setup round,
//! then edge orientation when messages are used, then the ticks.

mod adapter;
pub mod counting;
pub mod leader;
pub mod messaging;
pub mod outgoing;
pub mod standalone;

pub use adapter::{GrcProgram, GrcState};
pub use counting::{median_of, Counting, RepeatedCounting};
pub use leader::LeaderElection;
pub use messaging::Orient;
pub use outgoing::OutgoingDetection;

use rand::RngCore;

use crate::engine::{LocalPartition, NodeView, ProgramError};

pub const PINS: usize = 3;
pub const MSG_PIN: usize = 0;
pub const GLOBAL_PIN: usize = 1;
pub const CLUSTER_PIN: usize = 2;

/// Beep decisions (or heard bits) for the three circuit channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Signals {
    pub global: bool,
    pub cluster: bool,
    pub aux: bool,
}

impl Signals {
    pub fn global(global: bool) -> Self {
        Signals {
            global,
            ..Signals::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tick {
    Circuit(Signals),
    /// One optional bit per port.
    Message(Vec<Option<bool>>),
}

impl Tick {
    pub fn idle() -> Self {
        Tick::Circuit(Signals::default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Heard {
    Circuit(Signals),
    Message(Vec<Option<bool>>),
}

impl Heard {
    pub fn signals(&self) -> Result<Signals, ProgramError> {
        match self {
            Heard::Circuit(s) => Ok(*s),
            Heard::Message(_) => Err(ProgramError::Protocol("expected a circuit tick".into())),
        }
    }

    pub fn messages(&self) -> Result<&[Option<bool>], ProgramError> {
        match self {
            Heard::Message(m) => Ok(m),
            Heard::Circuit(_) => Err(ProgramError::Protocol("expected a message tick".into())),
        }
    }
}

/// A tick-level node algorithm.
///
/// All nodes must agree on the kind of every tick; procedures achieve this
/// by deciding tick kinds only from information heard on the global circuit.
pub trait Procedure: Clone + std::fmt::Debug {
    type Output: Clone + std::fmt::Debug;

    /// Ports whose cluster pins are bound together.
    fn cluster_ports(&self) -> &[bool];

    /// Called once after edge orientation, before the first tick.
    fn on_oriented(&mut self, _orientation: &[Orient]) {}

    fn tick(&mut self, rng: &mut dyn RngCore) -> Result<Tick, ProgramError>;

    fn hear(&mut self, heard: &Heard, rng: &mut dyn RngCore) -> Result<(), ProgramError>;

    fn finished(&self) -> bool;

    fn output(&self) -> Self::Output;
}

/// Creates the per-node procedure from the node's view.
pub trait ProcedureFactory {
    type Input;
    type Proc: Procedure;

    /// Whether pin 0 carries messages (and edges get oriented first).
    fn uses_messages(&self) -> bool;

    fn create(&self, view: NodeView<'_, Self::Input>, rng: &mut dyn RngCore) -> Self::Proc;
}

/// Partition for a composed program: global pins bound together, cluster
/// pins bound over `cluster`, message pins singletons unless `aux` binds
/// them into a second global circuit.
pub fn composed_partition(cluster: &[bool], aux: bool) -> LocalPartition {
    let degree = cluster.len();
    let global_label = u32::MAX - 1;
    let cluster_label = u32::MAX - 2;
    let aux_label = u32::MAX - 3;
    let mut labels = Vec::with_capacity(degree * PINS);
    for (port, &in_cluster) in cluster.iter().enumerate() {
        let base = (port * PINS) as u32;
        labels.push(if aux { aux_label } else { base });
        labels.push(global_label);
        labels.push(if in_cluster { cluster_label } else { base + 2 });
    }
    LocalPartition::from_labels(&labels)
}

/// One node's contribution to a global circuit on pin `index`: that pin of
/// every incident edge in one part, all other pins singletons.
pub fn global_circuit_part(degree: usize, k: usize, index: usize) -> LocalPartition {
    let labels: Vec<u32> = (0..degree * k)
        .map(|pos| {
            if pos % k == index {
                u32::MAX
            } else {
                pos as u32
            }
        })
        .collect();
    LocalPartition::from_labels(&labels)
}
