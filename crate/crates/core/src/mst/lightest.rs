use crate::graph::bit_length;
use crate::primitives::Signals;

/// Keeps only the lightest candidates of each cluster.
///
/// A candidate whose weight has `len` bits stays silent for `len - 1`
/// rounds, beeps on the cluster circuit in round `len`, then spends rounds
/// `len + 1 ..= 2 len` on its bits from the most significant one, beeping on
/// a 0. A silent candidate that hears a beep is unmarked. Candidates beep on
/// the global circuit until their last round; the stage ends with the first
/// globally silent round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lightest {
    weight: u64,
    len: u32,
    round: u32,
    marked: bool,
    beeped: bool,
    done: bool,
}

impl Lightest {
    pub fn new(candidate_weight: Option<u64>) -> Self {
        let weight = candidate_weight.unwrap_or(0);
        Lightest {
            weight,
            len: bit_length(weight),
            round: 0,
            marked: candidate_weight.is_some(),
            beeped: false,
            done: false,
        }
    }

    pub fn tick(&mut self) -> Signals {
        self.round += 1;
        let r = self.round;
        let len = self.len;
        self.beeped = self.marked
            && if r < len {
                false
            } else if r == len {
                true
            } else if r <= 2 * len {
                let j = r - len;
                (self.weight >> (len - j)) & 1 == 0
            } else {
                false
            };
        Signals {
            global: self.marked && r < 2 * len,
            cluster: self.beeped,
            aux: false,
        }
    }

    pub fn hear(&mut self, heard: Signals) {
        if self.marked && !self.beeped && heard.cluster && self.round <= 2 * self.len {
            self.marked = false;
        }
        if !heard.global {
            self.done = true;
        }
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn marked(&self) -> bool {
        self.marked
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Runs candidates sharing one cluster circuit; returns survivors.
    fn run(weights: &[u64]) -> Vec<bool> {
        let mut nodes: Vec<Lightest> = weights.iter().map(|&w| Lightest::new(Some(w))).collect();
        for _ in 0..200 {
            let sig: Vec<Signals> = nodes.iter_mut().map(|n| n.tick()).collect();
            let heard = Signals {
                global: sig.iter().any(|s| s.global),
                cluster: sig.iter().any(|s| s.cluster),
                aux: false,
            };
            nodes.iter_mut().for_each(|n| n.hear(heard));
            if nodes[0].done() {
                break;
            }
        }
        assert!(nodes.iter().all(|n| n.done()));
        nodes.iter().map(|n| n.marked()).collect()
    }

    #[test]
    fn equal_length_compares_bits() {
        assert_eq!(run(&[5, 6]), vec![true, false]);
    }

    #[test]
    fn shorter_weight_wins_in_wait_phase() {
        assert_eq!(run(&[2, 5]), vec![true, false]);
    }

    #[test]
    fn single_candidate_survives() {
        assert_eq!(run(&[9]), vec![true]);
    }

    #[test]
    fn all_minima_survive() {
        assert_eq!(
            run(&[7, 3, 3, 12, 1, 1]),
            vec![false, false, false, false, true, true]
        );
    }

    #[test]
    fn exhaustive_small_weights() {
        for a in 1..20u64 {
            for b in 1..20u64 {
                for c in 1..6u64 {
                    let w = [a, b, c];
                    let min = *w.iter().min().unwrap();
                    let expect: Vec<bool> = w.iter().map(|&x| x == min).collect();
                    assert_eq!(run(&w), expect, "{w:?}");
                }
            }
        }
    }
}
