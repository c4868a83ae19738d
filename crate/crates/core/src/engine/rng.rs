use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Supplies one independent random stream per node.
///
/// The node index is only used to select the stream and never reaches a
/// program.
pub trait RandomSource {
    fn node_stream(&self, node: usize) -> Box<dyn RngCore + Send>;
}

/// Default source: ChaCha8 keyed by the master seed, one stream per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededStreams(pub u64);

impl RandomSource for SeededStreams {
    fn node_stream(&self, node: usize) -> Box<dyn RngCore + Send> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(node as u64);
        Box::new(rng)
    }
}

/// One fair coin; heads is `true`.
pub fn coin(rng: &mut dyn RngCore) -> bool {
    rng.next_u32() & 1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let src = SeededStreams(42);
        let a: Vec<u32> = (0..8).map(|_| src.node_stream(3).next_u32()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s0 = src.node_stream(0);
        let mut s1 = src.node_stream(1);
        let x: Vec<u32> = (0..4).map(|_| s0.next_u32()).collect();
        let y: Vec<u32> = (0..4).map(|_| s1.next_u32()).collect();
        assert_ne!(x, y);
    }

    #[test]
    fn coins_are_roughly_fair() {
        let mut rng = SeededStreams(1).node_stream(0);
        let heads = (0..10_000).filter(|_| coin(rng.as_mut())).count();
        assert!((4700..5300).contains(&heads));
    }
}
