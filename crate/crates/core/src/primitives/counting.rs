use rand::RngCore;

use crate::engine::coin;

/// One execution of CountingToLogn on the global circuit.
///
/// Every competitor tosses a coin per round and beeps on heads; a tails
/// toss ends its competition. The execution ends with the first silent
/// round, whose index is the duration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counting {
    competitor: bool,
    rounds: u32,
    done: bool,
}

impl Counting {
    pub fn new(competitor: bool) -> Self {
        Counting {
            competitor,
            rounds: 0,
            done: false,
        }
    }

    /// Global beep for the current round.
    pub fn signal(&mut self, rng: &mut dyn RngCore) -> bool {
        if self.done || !self.competitor {
            return false;
        }
        let heads = coin(rng);
        if !heads {
            self.competitor = false;
        }
        heads
    }

    pub fn observe(&mut self, heard: bool) {
        if self.done {
            return;
        }
        self.rounds += 1;
        if !heard {
            self.done = true;
        }
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn competitor(&self) -> bool {
        self.competitor
    }

    /// Rounds so far, including the final silent one.
    pub fn duration(&self) -> u32 {
        self.rounds
    }
}

/// `total` executions of [`Counting`] one after another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatedCounting {
    total: u32,
    current: Counting,
    durations: Vec<u32>,
}

impl RepeatedCounting {
    pub fn new(total: u32) -> Self {
        RepeatedCounting {
            total,
            current: Counting::new(true),
            durations: Vec::new(),
        }
    }

    pub fn signal(&mut self, rng: &mut dyn RngCore) -> bool {
        if self.done() {
            return false;
        }
        self.current.signal(rng)
    }

    pub fn observe(&mut self, heard: bool) {
        if self.done() {
            return;
        }
        self.current.observe(heard);
        if self.current.done() {
            self.durations.push(self.current.duration());
            self.current = Counting::new(true);
        }
    }

    pub fn done(&self) -> bool {
        self.durations.len() as u32 >= self.total
    }

    pub fn completed(&self) -> u32 {
        self.durations.len() as u32
    }

    pub fn durations(&self) -> &[u32] {
        &self.durations
    }
}

/// The `r`-th fastest of `2r - 1` durations.
pub fn median_of(durations: &[u32], r: usize) -> Option<u32> {
    if r == 0 || durations.len() < r {
        return None;
    }
    let mut sorted = durations.to_vec();
    sorted.sort_unstable();
    Some(sorted[r - 1])
}
