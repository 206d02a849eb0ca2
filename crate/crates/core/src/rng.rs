//! Deterministic RNG for the simulation.
//!
//! The draw order of a run is normative for replay, so the generator and
//! every value-mapping below are frozen: xoshiro256++ for the stream,
//! splitmix64 for seeding. Output is stable across platforms and releases.
//! Not cryptographically secure.

/// One splitmix64 step: advances `state` and returns the mixed output.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// xoshiro256++ generator with splitmix64 seed expansion.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SimRng {
    s: [u64; 4],
}

impl SimRng {
    /// Seed the four state words by expanding `seed` through splitmix64.
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        SimRng { s }
    }

    /// Raw state words, for checkpoint serialization.
    pub fn state(&self) -> [u64; 4] {
        self.s
    }

    /// Rebuild from checkpointed state words.
    pub fn from_state(s: [u64; 4]) -> Self {
        SimRng { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform f64 in `[0, 1)`: the top 53 bits scaled by 2^-53.
    #[inline]
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform f64 in `[0, 1]` (closed upper end).
    #[inline]
    pub fn unit_f64_closed(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / ((1u64 << 53) - 1) as f64)
    }

    /// Uniform index in `[0, n)`, unbiased (Lemire's method).
    ///
    /// Consumes one `u64` except with probability < n/2^64, where rejection
    /// consumes more; the stream remains a pure function of the seed.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let n = n as u64;
        let mut x = self.next_u64();
        let mut m = (x as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as usize
    }

    /// Bernoulli(p) as `unit_f64() < p`; p=0 never fires, p=1 always fires.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }

    /// Fair coin from the low bit of one draw.
    #[inline]
    pub fn coin(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Uniform f64 in `[lo, hi)`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit_f64()
    }

    /// Uniform f64 on the closed interval `[lo, hi]`.
    #[inline]
    pub fn uniform_closed(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit_f64_closed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SimRng::seed_from_u64(42);
        let mut b = SimRng::seed_from_u64(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn unit_f64_in_range() {
        let mut rng = SimRng::seed_from_u64(7);
        for _ in 0..10_000 {
            let u = rng.unit_f64();
            assert!((0.0..1.0).contains(&u));
            let c = rng.unit_f64_closed();
            assert!((0.0..=1.0).contains(&c));
        }
    }

    #[test]
    fn closed_unit_attains_one() {
        // x = 2^53 - 1 maps to exactly 1.0.
        let max = ((1u64 << 53) - 1) as f64 * (1.0 / ((1u64 << 53) - 1) as f64);
        assert_eq!(max, 1.0);
    }

    #[test]
    fn index_bounds_and_degenerate() {
        let mut rng = SimRng::seed_from_u64(3);
        for _ in 0..10_000 {
            assert!(rng.index(7) < 7);
        }
        for _ in 0..100 {
            assert_eq!(rng.index(1), 0);
        }
    }

    // Uniformity sanity: chi-squared over bins, each bin within 4 sigma of
    // its expectation under the uniform null.
    #[test]
    fn index_uniform_within_4_sigma() {
        let mut rng = SimRng::seed_from_u64(99);
        let bins = 50usize;
        let draws = 200_000usize;
        let mut counts = vec![0u64; bins];
        for _ in 0..draws {
            counts[rng.index(bins)] += 1;
        }
        let p = 1.0 / bins as f64;
        let expect = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            let dev = (c as f64 - expect).abs();
            assert!(
                dev < 4.0 * sigma,
                "bin {i}: count {c}, expected {expect:.1} +/- {:.1}",
                4.0 * sigma
            );
        }
    }

    #[test]
    fn bernoulli_extremes() {
        let mut rng = SimRng::seed_from_u64(5);
        for _ in 0..1000 {
            assert!(!rng.bernoulli(0.0));
            assert!(rng.bernoulli(1.0));
        }
    }

    #[test]
    fn state_roundtrip() {
        let mut rng = SimRng::seed_from_u64(11);
        rng.next_u64();
        let mut copy = SimRng::from_state(rng.state());
        assert_eq!(rng.next_u64(), copy.next_u64());
    }
}
