use rand::RngCore;

use super::bridging::Bridging;
use super::clusters::ClusterBfs;
use super::sampler::{delta_from_bits, Sampler, SamplerConfig};
use crate::engine::{NodeView, ProgramError};
use crate::primitives::{Heard, Procedure, ProcedureFactory, Signals, Tick};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Mode {
    Interleaved(Sampler),
    Sequential {
        iteration: u32,
        sampler: Sampler,
        bits: u64,
    },
    Done,
}

/// Computes `delta_v` on the global circuit, either from one interleaved
/// sampler or from `kappa - 1` samplers that each run a single experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSampler {
    cfg: SamplerConfig,
    mode: Mode,
    delta: Option<u32>,
    durations: Vec<u32>,
}

impl DeltaSampler {
    pub fn new(cfg: SamplerConfig, low_memory: bool) -> Self {
        let (mode, delta) = if cfg.kappa == 1 {
            (Mode::Done, Some(0))
        } else if low_memory {
            let sampler = Sampler::new(&cfg, Some(0));
            (
                Mode::Sequential {
                    iteration: 0,
                    sampler,
                    bits: 0,
                },
                None,
            )
        } else {
            (Mode::Interleaved(Sampler::new(&cfg, None)), None)
        };
        DeltaSampler {
            cfg,
            mode,
            delta,
            durations: Vec::new(),
        }
    }

    pub fn tick(&mut self, rng: &mut dyn RngCore) -> Signals {
        match &mut self.mode {
            Mode::Interleaved(s) | Mode::Sequential { sampler: s, .. } => s.tick(rng),
            Mode::Done => Signals::default(),
        }
    }

    pub fn hear(&mut self, heard: Signals) {
        match &mut self.mode {
            Mode::Interleaved(s) => {
                s.hear(heard);
                if let (Some(bits), Some(d)) = (s.median_bits(), s.median_duration()) {
                    self.durations.push(d);
                    self.delta = Some(delta_from_bits(bits, self.cfg.kappa));
                    self.mode = Mode::Done;
                }
            }
            Mode::Sequential {
                iteration,
                sampler,
                bits,
            } => {
                sampler.hear(heard);
                if let (Some(b), Some(d)) = (sampler.median_bits(), sampler.median_duration()) {
                    self.durations.push(d);
                    *bits |= b & (1 << *iteration);
                    *iteration += 1;
                    if *iteration + 1 < self.cfg.kappa {
                        *sampler = Sampler::new(&self.cfg, Some(*iteration));
                    } else {
                        self.delta = Some(delta_from_bits(*bits, self.cfg.kappa));
                        self.mode = Mode::Done;
                    }
                }
            }
            Mode::Done => {}
        }
    }

    pub fn delta(&self) -> Option<u32> {
        self.delta
    }

    /// Median execution length of every sampler run so far.
    pub fn durations(&self) -> &[u32] {
        &self.durations
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannerOutput {
    /// Ports whose edges belong to `H`.
    pub h_ports: Vec<bool>,
    pub delta: u32,
    pub center: bool,
    pub parent: Option<usize>,
    /// Distance from the virtual root.
    pub distance: u32,
    pub tree_ports: Vec<bool>,
    pub bridge_ports: Vec<bool>,
    pub sample_durations: Vec<u32>,
    pub bridging_iterations: u32,
}

#[derive(Debug, Clone, PartialEq)]
enum Stage {
    Sample(DeltaSampler),
    Bfs(ClusterBfs),
    Bridge(Bridging),
    Done,
}

/// The spanner construction: sampling, clustering around centers, then
/// bridging edges between neighbouring clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct SpannerMachine {
    cfg: SamplerConfig,
    degree: usize,
    stage: Stage,
    delta: u32,
    durations: Vec<u32>,
    bfs: Option<ClusterBfs>,
    cluster: Vec<bool>,
    bridges: Vec<bool>,
    iterations: u32,
}

impl SpannerMachine {
    /// A fixed `delta` skips sampling.
    pub fn new(degree: usize, cfg: SamplerConfig, low_memory: bool, delta: Option<u32>) -> Self {
        let mut m = SpannerMachine {
            cfg,
            degree,
            stage: Stage::Done,
            delta: 0,
            durations: Vec::new(),
            bfs: None,
            cluster: vec![false; degree],
            bridges: vec![false; degree],
            iterations: 0,
        };
        m.stage = match delta {
            Some(d) => m.start_bfs(d),
            None => {
                let s = DeltaSampler::new(cfg, low_memory);
                match s.delta() {
                    Some(d) => m.start_bfs(d),
                    None => Stage::Sample(s),
                }
            }
        };
        m
    }

    fn start_bfs(&mut self, delta: u32) -> Stage {
        self.delta = delta.min(self.cfg.kappa - 1);
        Stage::Bfs(ClusterBfs::new(self.degree, self.cfg.kappa, self.delta))
    }

    pub fn cluster_ports(&self) -> &[bool] {
        &self.cluster
    }

    pub fn done(&self) -> bool {
        self.stage == Stage::Done
    }

    pub fn tick(&mut self, rng: &mut dyn RngCore) -> Tick {
        match &mut self.stage {
            Stage::Sample(s) => Tick::Circuit(s.tick(rng)),
            Stage::Bfs(b) => b.tick(),
            Stage::Bridge(b) => b.tick(rng),
            Stage::Done => Tick::idle(),
        }
    }

    pub fn hear(&mut self, heard: &Heard) -> Result<(), ProgramError> {
        match &mut self.stage {
            Stage::Sample(s) => {
                s.hear(heard.signals()?);
                if let Some(d) = s.delta() {
                    self.durations = s.durations().to_vec();
                    self.stage = self.start_bfs(d);
                }
            }
            Stage::Bfs(b) => {
                b.hear(heard)?;
                if b.done() {
                    self.cluster = b.tree_ports();
                    let center = b.center();
                    self.bfs = Some(b.clone());
                    self.stage =
                        Stage::Bridge(Bridging::new(self.degree, center, 4 * self.cfg.c + 7));
                }
            }
            Stage::Bridge(b) => {
                b.hear(heard)?;
                if b.done() {
                    self.bridges = b.bridge_ports();
                    self.iterations = b.iterations();
                    self.stage = Stage::Done;
                }
            }
            Stage::Done => {}
        }
        Ok(())
    }

    pub fn output(&self) -> SpannerOutput {
        let bfs = self.bfs.as_ref();
        let tree_ports = bfs.map_or_else(|| vec![false; self.degree], |b| b.tree_ports());
        let h_ports = tree_ports
            .iter()
            .zip(&self.bridges)
            .map(|(&t, &b)| t || b)
            .collect();
        SpannerOutput {
            h_ports,
            delta: self.delta,
            center: bfs.is_some_and(|b| b.center()),
            parent: bfs.and_then(|b| b.parent()),
            distance: bfs.and_then(|b| b.distance()).unwrap_or(0),
            tree_ports,
            bridge_ports: self.bridges.clone(),
            sample_durations: self.durations.clone(),
            bridging_iterations: self.iterations,
        }
    }
}

/// Factory for the spanner program. Input: an optional fixed `delta_v`.
#[derive(Debug, Clone, Copy)]
pub struct Spanner {
    pub cfg: SamplerConfig,
    pub low_memory: bool,
}

#[derive(Debug, Clone)]
pub struct SpannerProc(SpannerMachine);

impl ProcedureFactory for Spanner {
    type Input = Option<u32>;
    type Proc = SpannerProc;

    fn uses_messages(&self) -> bool {
        true
    }

    fn create(&self, view: NodeView<'_, Option<u32>>, _rng: &mut dyn RngCore) -> SpannerProc {
        SpannerProc(SpannerMachine::new(
            view.degree,
            self.cfg,
            self.low_memory,
            *view.input,
        ))
    }
}

impl Procedure for SpannerProc {
    type Output = SpannerOutput;

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
        self.0.done()
    }

    fn output(&self) -> SpannerOutput {
        self.0.output()
    }
}

/// Sampling only, as a standalone program; outputs `delta_v` and the median
/// execution lengths.
#[derive(Debug, Clone, Copy)]
pub struct DeltaSampling {
    pub cfg: SamplerConfig,
    pub low_memory: bool,
}

#[derive(Debug, Clone)]
pub struct DeltaSamplingProc {
    sampler: DeltaSampler,
    cluster: Vec<bool>,
}

impl ProcedureFactory for DeltaSampling {
    type Input = ();
    type Proc = DeltaSamplingProc;

    fn uses_messages(&self) -> bool {
        false
    }

    fn create(&self, view: NodeView<'_, ()>, _rng: &mut dyn RngCore) -> DeltaSamplingProc {
        DeltaSamplingProc {
            sampler: DeltaSampler::new(self.cfg, self.low_memory),
            cluster: vec![false; view.degree],
        }
    }
}

impl Procedure for DeltaSamplingProc {
    type Output = (u32, Vec<u32>);

    fn cluster_ports(&self) -> &[bool] {
        &self.cluster
    }

    fn tick(&mut self, rng: &mut dyn RngCore) -> Result<Tick, ProgramError> {
        Ok(Tick::Circuit(self.sampler.tick(rng)))
    }

    fn hear(&mut self, heard: &Heard, _rng: &mut dyn RngCore) -> Result<(), ProgramError> {
        self.sampler.hear(heard.signals()?);
        Ok(())
    }

    fn finished(&self) -> bool {
        self.sampler.delta().is_some()
    }

    fn output(&self) -> (u32, Vec<u32>) {
        (
            self.sampler.delta().unwrap_or(0),
            self.sampler.durations().to_vec(),
        )
    }
}
