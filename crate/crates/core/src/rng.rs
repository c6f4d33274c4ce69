//! Random streams used by the samplers.
//!
//! Samplers only ever ask for a uniform integer below a bound, so they are
//! written against [`DrawSource`] instead of a concrete generator. Any
//! `rand::Rng` is a draw source; tests can substitute a scripted source to
//! walk every branch of a sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub trait DrawSource {
    /// Uniform integer in `0..bound`. `bound` is at least 1.
    fn below(&mut self, bound: u64) -> u64;
}

impl<R: Rng + ?Sized> DrawSource for R {
    fn below(&mut self, bound: u64) -> u64 {
        self.random_range(0..bound)
    }
}

/// Independent stream number `stream` derived from `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, 3).below(1 << 40)).collect();
        let mut s = stream(7, 3);
        let b: Vec<u64> = (0..4).map(|_| s.below(1 << 40)).collect();
        assert_eq!(a[0], b[0]);
        let mut t = stream(7, 4);
        let c: Vec<u64> = (0..4).map(|_| t.below(1 << 40)).collect();
        assert_ne!(b, c);
    }
}
