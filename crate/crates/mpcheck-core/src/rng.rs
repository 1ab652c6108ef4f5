//! Deterministic counter-based pseudo-randomness.
//!
//! Analytic distributions in this crate never sample; this module exists
//! for the pieces that do need reproducible randomness — seeded protocol
//! sessions in the networked harness and the sampled distinguisher family
//! in the reduction checks. The generator is splitmix64: output `i` is a
//! pure function of `(seed, i)`, so any draw can be replayed or accessed
//! at random.

/// splitmix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// A counter-based generator seeded with 64 bits.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.seed.wrapping_add(GAMMA.wrapping_mul(self.counter)))
    }

    /// Exactly uniform draw from `0..n` via rejection sampling.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = (u64::MAX / n) * n;
        loop {
            let r = self.next_u64();
            if r < zone {
                return r % n;
            }
        }
    }

    /// Uniform draw from `1..n` (the units of a prime field).
    pub fn unit_below(&mut self, n: u64) -> u64 {
        assert!(n > 1, "no units below {}", n);
        loop {
            let r = self.below(n);
            if r != 0 {
                return r;
            }
        }
    }

    /// Uniform draw from `0..n` excluding `excluded`.
    pub fn below_except(&mut self, n: u64, excluded: u64) -> u64 {
        assert!(n > 1, "range too small to exclude a value");
        loop {
            let r = self.below(n);
            if r != excluded {
                return r;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 1
    }
}

/// FNV-1a over a word sequence; used to key deterministic functions of
/// structured values (e.g. sampled distinguishers).
pub fn fnv1a64(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut hash: u64 = 0xCBF2_9CE4_8422_2325;
    for w in words {
        for byte in w.to_be_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_replayable() {
        let mut a = CounterRng::new(42);
        let mut b = CounterRng::new(42);
        let xs: alloc::vec::Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: alloc::vec::Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let mut c = CounterRng::new(43);
        assert_ne!(xs[0], c.next_u64());
    }

    #[test]
    fn below_in_range() {
        let mut rng = CounterRng::new(7);
        for _ in 0..1000 {
            assert!(rng.below(5) < 5);
            assert!(rng.unit_below(5) != 0);
            assert!(rng.below_except(5, 3) != 3);
        }
    }

    #[test]
    fn below_roughly_uniform() {
        let mut rng = CounterRng::new(1);
        let mut counts = [0u32; 3];
        for _ in 0..30_000 {
            counts[rng.below(3) as usize] += 1;
        }
        for c in counts {
            assert!((9_000..11_000).contains(&c), "count {} out of range", c);
        }
    }
}
