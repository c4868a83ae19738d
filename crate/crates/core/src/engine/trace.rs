use std::fmt::Write as _;
use std::sync::Arc;

use super::{render_partition, CircuitPartition, LocalPartition, LocalPin};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceMode {
    #[default]
    Off,
    Full,
}

/// What one node did in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    /// Partition in effect during the round.
    pub partition: LocalPartition,
    pub beeps: Vec<LocalPin>,
    /// One bit per local pin, `port * k + index` order.
    pub feedback: Vec<bool>,
    /// Debug rendering of the state after the round.
    pub state: String,
    pub halted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u64,
    pub circuits: Arc<CircuitPartition>,
    pub nodes: Vec<NodeRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub k: usize,
    pub rounds: Vec<RoundRecord>,
}

impl Trace {
    pub fn new(k: usize) -> Self {
        Trace {
            k,
            rounds: Vec::new(),
        }
    }

    /// One line per (round, node).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            for (v, rec) in r.nodes.iter().enumerate() {
                let _ = write!(
                    out,
                    "round={} node={} circuits={} partition={} beeps=[",
                    r.round,
                    v,
                    r.circuits.class_count(),
                    render_partition(&rec.partition, self.k)
                );
                for (i, p) in rec.beeps.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{p}");
                }
                out.push_str("] feedback=");
                for &b in &rec.feedback {
                    out.push(if b { '1' } else { '0' });
                }
                if rec.halted {
                    out.push_str(" halted");
                }
                let _ = writeln!(out, " state={}", rec.state);
            }
        }
        out
    }
}
