//! Deterministic entropy stand-in for simulated measurements.
//!
//! A [`RandomSource`] is a ChaCha8 keystream keyed by a 64-bit master seed.
//! Substream `i` keeps the key and selects ChaCha stream number `i`, so
//! blocks of work can be generated in any order, on any number of workers,
//! and still reproduce the sequential output bit for bit.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    /// Stream 0 of the generator keyed by `seed`.
    pub fn new(seed: u64) -> Self {
        Self::keyed(seed, 0)
    }

    fn keyed(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// Substream `index` for the same master seed, positioned at its start.
    pub fn substream(&self, index: u64) -> Self {
        Self::keyed(self.seed, index)
    }

    /// A fresh master seed derived from `(seed, label)`, for independent
    /// experiments (sweep cells, CHSH settings) that each need their own
    /// family of substreams.
    pub fn fork(&self, label: u64) -> Self {
        Self::new(splitmix64(
            self.seed ^ splitmix64(label.wrapping_add(0x5851_f42d_4c95_7f2d)),
        ))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `(0, 1]`; never returns zero.
    #[inline]
    pub fn uniform_open_closed(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw. `p <= 0` never fires and consumes no entropy.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            return false;
        }
        if p >= 1.0 {
            return true;
        }
        self.uniform() < p
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn substream_is_positioned_at_start() {
        let master = RandomSource::new(7);
        let mut used = master.substream(3);
        used.next_u64();
        let mut fresh = used.substream(3);
        let mut again = master.substream(3);
        assert_eq!(fresh.next_u64(), again.next_u64());
    }

    #[test]
    fn substreams_differ() {
        let master = RandomSource::new(7);
        let (mut s0, mut s1) = (master.substream(0), master.substream(1));
        let a: Vec<u64> = (0..8).map(|_| s0.next_u64()).collect();
        let b: Vec<u64> = (0..8).map(|_| s1.next_u64()).collect();
        assert_ne!(a, b);
        assert_ne!(master.fork(1).seed(), master.fork(2).seed());
    }

    #[test]
    fn open_closed_never_zero() {
        let mut r = RandomSource::new(1);
        for _ in 0..100_000 {
            let u = r.uniform_open_closed();
            assert!(u > 0.0 && u <= 1.0);
        }
    }
}
