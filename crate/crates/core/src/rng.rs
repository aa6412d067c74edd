//! Seedable, portable random number generation for the experiment lab.
//!
//! The generator is SplitMix64: a 64-bit counter advanced by the golden-ratio
//! increment and passed through a finalizer. Output is identical on every
//! platform, which keeps sweep artifacts byte-reproducible.
//!
//! Stream splitting: trial `k` of a sweep seeded with `seed` draws from
//! [`SplitMix64::fork`]`(seed, k)`, which seeds a fresh generator with
//! `mix(seed + (k + 1)·GAMMA)`. Trials are therefore independent of how many
//! trials run and in what order.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    /// Independent generator for sub-stream `stream` of `seed` (see the
    /// module docs for the splitting rule).
    pub fn fork(seed: u64, stream: u64) -> SplitMix64 {
        SplitMix64::new(mix(
            seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(GAMMA))
        ))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform draw from `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via Box–Muller (cosine branch).
    pub fn next_gaussian(&mut self) -> f64 {
        // Shift into (0, 1] so the logarithm stays finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
