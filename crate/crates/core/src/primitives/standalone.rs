//! Each primitive wrapped as a complete program, for measurement and tests.

use rand::RngCore;

use super::counting::RepeatedCounting;
use super::leader::LeaderElection;
use super::outgoing::OutgoingDetection;
use super::{Heard, Orient, Procedure, ProcedureFactory, Signals, Tick};
use crate::engine::{NodeView, ProgramError};

/// `executions` sequential CountingToLogn runs; outputs every duration.
#[derive(Debug, Clone, Copy)]
pub struct CountingRuns {
    pub executions: u32,
}

#[derive(Debug, Clone)]
pub struct CountingProc {
    runs: RepeatedCounting,
    cluster: Vec<bool>,
}

impl ProcedureFactory for CountingRuns {
    type Input = ();
    type Proc = CountingProc;

    fn uses_messages(&self) -> bool {
        false
    }

    fn create(&self, view: NodeView<'_, ()>, _rng: &mut dyn RngCore) -> CountingProc {
        CountingProc {
            runs: RepeatedCounting::new(self.executions),
            cluster: vec![false; view.degree],
        }
    }
}

impl Procedure for CountingProc {
    type Output = Vec<u32>;

    fn cluster_ports(&self) -> &[bool] {
        &self.cluster
    }

    fn tick(&mut self, rng: &mut dyn RngCore) -> Result<Tick, ProgramError> {
        Ok(Tick::Circuit(Signals::global(self.runs.signal(rng))))
    }

    fn hear(&mut self, heard: &Heard, _rng: &mut dyn RngCore) -> Result<(), ProgramError> {
        self.runs.observe(heard.signals()?.global);
        Ok(())
    }

    fn finished(&self) -> bool {
        self.runs.done()
    }

    fn output(&self) -> Vec<u32> {
        self.runs.durations().to_vec()
    }
}

/// Leader election among the nodes whose input is `true`, over a circuit
/// spanning the whole graph.
#[derive(Debug, Clone, Copy)]
pub struct Election {
    pub c: u32,
}

#[derive(Debug, Clone)]
pub struct ElectionProc {
    election: LeaderElection,
    cluster: Vec<bool>,
}

impl ProcedureFactory for Election {
    type Input = bool;
    type Proc = ElectionProc;

    fn uses_messages(&self) -> bool {
        false
    }

    fn create(&self, view: NodeView<'_, bool>, _rng: &mut dyn RngCore) -> ElectionProc {
        ElectionProc {
            election: LeaderElection::new(*view.input, self.c),
            cluster: vec![true; view.degree],
        }
    }
}

impl Procedure for ElectionProc {
    type Output = bool;

    fn cluster_ports(&self) -> &[bool] {
        &self.cluster
    }

    fn tick(&mut self, rng: &mut dyn RngCore) -> Result<Tick, ProgramError> {
        Ok(Tick::Circuit(self.election.tick(rng)))
    }

    fn hear(&mut self, heard: &Heard, _rng: &mut dyn RngCore) -> Result<(), ProgramError> {
        self.election.hear(heard.signals()?);
        Ok(())
    }

    fn finished(&self) -> bool {
        self.election.done()
    }

    fn output(&self) -> bool {
        self.election.leader()
    }
}

/// Only the edge orientation preprocessing; outputs the orientation.
#[derive(Debug, Clone, Copy)]
pub struct Orientation;

#[derive(Debug, Clone)]
pub struct OrientationProc {
    orientation: Option<Vec<Orient>>,
    cluster: Vec<bool>,
}

impl ProcedureFactory for Orientation {
    type Input = ();
    type Proc = OrientationProc;

    fn uses_messages(&self) -> bool {
        true
    }

    fn create(&self, view: NodeView<'_, ()>, _rng: &mut dyn RngCore) -> OrientationProc {
        OrientationProc {
            orientation: None,
            cluster: vec![false; view.degree],
        }
    }
}

impl Procedure for OrientationProc {
    type Output = Vec<Orient>;

    fn cluster_ports(&self) -> &[bool] {
        &self.cluster
    }

    fn on_oriented(&mut self, orientation: &[Orient]) {
        self.orientation = Some(orientation.to_vec());
    }

    fn tick(&mut self, _rng: &mut dyn RngCore) -> Result<Tick, ProgramError> {
        Ok(Tick::idle())
    }

    fn hear(&mut self, _heard: &Heard, _rng: &mut dyn RngCore) -> Result<(), ProgramError> {
        Ok(())
    }

    fn finished(&self) -> bool {
        self.orientation.is_some()
    }

    fn output(&self) -> Vec<Orient> {
        self.orientation.clone().unwrap_or_default()
    }
}

/// One message frame: node input is the message per port, output the
/// message received per port.
#[derive(Debug, Clone, Copy)]
pub struct Exchange;

#[derive(Debug, Clone)]
pub struct ExchangeProc {
    send: Vec<Option<bool>>,
    received: Option<Vec<Option<bool>>>,
    cluster: Vec<bool>,
}

impl ProcedureFactory for Exchange {
    type Input = Vec<Option<bool>>;
    type Proc = ExchangeProc;

    fn uses_messages(&self) -> bool {
        true
    }

    fn create(
        &self,
        view: NodeView<'_, Vec<Option<bool>>>,
        _rng: &mut dyn RngCore,
    ) -> ExchangeProc {
        ExchangeProc {
            send: view.input.clone(),
            received: None,
            cluster: vec![false; view.degree],
        }
    }
}

impl Procedure for ExchangeProc {
    type Output = Vec<Option<bool>>;

    fn cluster_ports(&self) -> &[bool] {
        &self.cluster
    }

    fn tick(&mut self, _rng: &mut dyn RngCore) -> Result<Tick, ProgramError> {
        Ok(Tick::Message(self.send.clone()))
    }

    fn hear(&mut self, heard: &Heard, _rng: &mut dyn RngCore) -> Result<(), ProgramError> {
        self.received = Some(heard.messages()?.to_vec());
        Ok(())
    }

    fn finished(&self) -> bool {
        self.received.is_some()
    }

    fn output(&self) -> Vec<Option<bool>> {
        self.received.clone().unwrap_or_default()
    }
}

/// Input of standalone outgoing-edge detection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectInput {
    /// Per port: whether the edge belongs to the cluster edge set.
    pub cluster: Vec<bool>,
    pub participant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectOutput {
    pub outgoing: Vec<bool>,
    pub leader: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Detect {
    pub c: u32,
}

#[derive(Debug, Clone)]
pub struct DetectProc {
    detect: OutgoingDetection,
    cluster: Vec<bool>,
}

impl ProcedureFactory for Detect {
    type Input = DetectInput;
    type Proc = DetectProc;

    fn uses_messages(&self) -> bool {
        true
    }

    fn create(&self, view: NodeView<'_, DetectInput>, _rng: &mut dyn RngCore) -> DetectProc {
        DetectProc {
            detect: OutgoingDetection::new(view.degree, view.input.participant, self.c),
            cluster: view.input.cluster.clone(),
        }
    }
}

impl Procedure for DetectProc {
    type Output = DetectOutput;

    fn cluster_ports(&self) -> &[bool] {
        &self.cluster
    }

    fn tick(&mut self, rng: &mut dyn RngCore) -> Result<Tick, ProgramError> {
        Ok(self.detect.tick(rng))
    }

    fn hear(&mut self, heard: &Heard, _rng: &mut dyn RngCore) -> Result<(), ProgramError> {
        self.detect.hear(heard)
    }

    fn finished(&self) -> bool {
        self.detect.done()
    }

    fn output(&self) -> DetectOutput {
        DetectOutput {
            outgoing: self.detect.outgoing().to_vec(),
            leader: self.detect.leader(),
        }
    }
}
