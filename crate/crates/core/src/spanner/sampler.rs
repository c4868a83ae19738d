use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::coin;
use crate::primitives::{Counting, Signals};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("kappa must be in 1..=64, got {0}")]
    Kappa(u32),
    #[error("epsilon must be in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("c must be positive")]
    Confidence,
}

/// Parameters of the distributed sampling procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub kappa: u32,
    pub eps: f64,
    pub c: u32,
}

impl SamplerConfig {
    pub fn new(kappa: u32, eps: f64, c: u32) -> Result<Self, SamplerError> {
        if !(1..=64).contains(&kappa) {
            return Err(SamplerError::Kappa(kappa));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(SamplerError::Epsilon(eps));
        }
        if c == 0 {
            return Err(SamplerError::Confidence);
        }
        Ok(SamplerConfig { kappa, eps, c })
    }

    /// `eps / (2 + eps)`.
    pub fn eps_prime(&self) -> f64 {
        self.eps / (2.0 + self.eps)
    }

    /// Random bits per drawing round, `1 / (1 - eps')`; may be fractional.
    pub fn bits_per_round(&self) -> f64 {
        (2.0 + self.eps) / 2.0
    }

    /// `ceil(c / eps')`, the execution count at which sampling halts.
    pub fn halt_at(&self) -> u32 {
        let x = self.c as f64 * (2.0 + self.eps) / self.eps;
        (x - 1e-9).ceil() as u32
    }

    /// `2 ceil(c / eps') - 1` interleaved executions.
    pub fn executions(&self) -> u32 {
        2 * self.halt_at() - 1
    }

    /// Success probability of one drawing round.
    pub fn round_success(&self) -> f64 {
        1.0 - 0.5f64.powf(self.bits_per_round())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Execution {
    counting: Counting,
    round: u32,
    bits: u64,
}

/// Interleaved executions of the basic scheme on the global circuit.
///
/// Execution `i` owns every `executions`-th round. In its round `j`, with
/// `j mod kappa != 0`, a node draws for experiment `(j - 1) mod kappa`.
/// Sampling ends when `halt_at` executions have finished; the execution that
/// finished last is the median one and determines the result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sampler {
    kappa: u32,
    bits_per_round: u64,
    halt_at: u32,
    only: Option<u32>,
    execs: Vec<Execution>,
    cursor: usize,
    finished: u32,
    median: Option<usize>,
    draw_integer: bool,
    success_millionths: u64,
}

impl Sampler {
    /// With `only = Some(i)`, draws only for experiment `i`.
    pub fn new(cfg: &SamplerConfig, only: Option<u32>) -> Self {
        let q = cfg.bits_per_round();
        let draw_integer = (q - q.round()).abs() < 1e-12;
        Sampler {
            kappa: cfg.kappa,
            bits_per_round: q.round() as u64,
            halt_at: cfg.halt_at(),
            only,
            execs: vec![
                Execution {
                    counting: Counting::new(true),
                    round: 0,
                    bits: 0,
                };
                cfg.executions() as usize
            ],
            cursor: 0,
            finished: 0,
            median: None,
            draw_integer,
            success_millionths: (cfg.round_success() * 1e6).round() as u64,
        }
    }

    fn draw(&self, rng: &mut dyn RngCore) -> bool {
        if self.draw_integer {
            let mut any = false;
            for _ in 0..self.bits_per_round {
                any |= coin(rng);
            }
            any
        } else {
            rng.gen_ratio(self.success_millionths as u32, 1_000_000)
        }
    }

    pub fn tick(&mut self, rng: &mut dyn RngCore) -> Signals {
        let i = self.cursor;
        if self.execs[i].counting.done() {
            return Signals::default();
        }
        let global = self.execs[i].counting.signal(rng);
        let j = self.execs[i].round + 1;
        if !j.is_multiple_of(self.kappa) {
            let idx = (j - 1) % self.kappa;
            if self.only.is_none_or(|e| e == idx) && self.draw(rng) {
                self.execs[i].bits |= 1 << idx;
            }
        }
        Signals::global(global)
    }

    pub fn hear(&mut self, heard: Signals) {
        let i = self.cursor;
        let ex = &mut self.execs[i];
        if !ex.counting.done() {
            ex.round += 1;
            ex.counting.observe(heard.global);
            if ex.counting.done() {
                self.finished += 1;
                if self.finished == self.halt_at {
                    self.median = Some(i);
                }
            }
        }
        self.cursor = (self.cursor + 1) % self.execs.len();
    }

    pub fn done(&self) -> bool {
        self.median.is_some()
    }

    /// Experiment bits of the median execution.
    pub fn median_bits(&self) -> Option<u64> {
        self.median.map(|i| self.execs[i].bits)
    }

    /// Duration of the median execution.
    pub fn median_duration(&self) -> Option<u32> {
        self.median.map(|i| self.execs[i].round)
    }
}

/// First set experiment among `0..kappa-1`, or `kappa - 1`.
pub fn delta_from_bits(bits: u64, kappa: u32) -> u32 {
    (0..kappa.saturating_sub(1))
        .find(|&j| bits >> j & 1 == 1)
        .unwrap_or(kappa.saturating_sub(1))
}

/// Number of drawing rounds of experiment `idx` in an execution of
/// `duration` rounds.
pub fn draw_rounds(duration: u32, kappa: u32, idx: u32) -> u32 {
    (1..=duration)
        .filter(|&j| j % kappa != 0 && (j - 1) % kappa == idx)
        .count() as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{RandomSource, SeededStreams};

    #[test]
    fn derived_constants() {
        let cfg = SamplerConfig::new(3, 0.5, 3).unwrap();
        assert!((cfg.eps_prime() - 0.2).abs() < 1e-12);
        assert_eq!(cfg.halt_at(), 15);
        assert_eq!(cfg.executions(), 29);
        assert!((cfg.bits_per_round() - 1.25).abs() < 1e-12);
        let ratio = (1.0 + cfg.eps_prime()) / (1.0 - cfg.eps_prime());
        assert!(ratio <= 1.0 + cfg.eps + 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SamplerConfig::new(0, 0.5, 3).is_err());
        assert!(SamplerConfig::new(3, 1.0, 3).is_err());
        assert!(SamplerConfig::new(3, 0.5, 0).is_err());
    }

    #[test]
    fn delta_rules() {
        assert_eq!(delta_from_bits(0, 4), 3);
        assert_eq!(delta_from_bits(0b110, 4), 1);
        assert_eq!(delta_from_bits(0b1000, 4), 3);
        assert_eq!(delta_from_bits(0, 1), 0);
    }

    #[test]
    fn draw_round_counts() {
        assert_eq!(draw_rounds(7, 3, 0), 3);
        assert_eq!(draw_rounds(7, 3, 1), 2);
        assert_eq!(draw_rounds(2, 1, 0), 0);
    }

    #[test]
    fn lone_node_sampling_terminates() {
        let cfg = SamplerConfig::new(4, 0.5, 1).unwrap();
        let mut rng = SeededStreams(2).node_stream(0);
        let mut s = Sampler::new(&cfg, None);
        let mut rounds = 0;
        while !s.done() {
            let sig = s.tick(rng.as_mut());
            s.hear(sig);
            rounds += 1;
            assert!(rounds < 100_000);
        }
        assert!(s.median_duration().unwrap() >= 1);
        assert!(s.median_bits().unwrap() < 1 << 3);
    }
}
