//! Deterministic random number generation.
//!
//! Every experiment owns a set of named streams (`data`, `latent`, `init`,
//! `clamp-noise`, ...) so that toggling one feature never shifts the random
//! sequence consumed by another. A stream is a SplitMix64 generator (64-bit
//! state); child streams are derived from a base seed and a stream name, so
//! stream layout is a pure function of the run configuration.
//!
//! The generator is fully specified here rather than pulled from a crate:
//! run logs must be byte-identical across invocations, and sweep analyses
//! compare runs that differ only in these seeds.

/// SplitMix64 stream generator.
///
/// State transition: `s += 0x9E3779B97F4A7C15`, output = `mix(s)` where
/// `mix` is the standard SplitMix64 finalizer. Normal variates use the
/// Box-Muller transform and cache the second value of each pair.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
    spare_normal: Option<f64>,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a hash of a stream name, used to derive child seeds.
#[inline]
fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

impl Rng {
    /// Stream seeded directly from a 64-bit value.
    pub fn new(seed: u64) -> Self {
        Rng { state: seed, spare_normal: None }
    }

    /// Named stream derived from a base seed.
    ///
    /// The child seed is `mix(base ^ fnv1a(name))`, so distinct names give
    /// decorrelated streams and the derivation is stable across runs.
    pub fn seeded(base: u64, name: &str) -> Self {
        Rng::new(mix(base ^ fnv1a(name)))
    }

    /// Derive a child stream without advancing this one.
    pub fn split(&self, name: &str) -> Rng {
        Rng::seeded(self.state, name)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`.
    pub fn next_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_index called with n = 0");
        // Multiply-shift bounding; bias is negligible for n << 2^64.
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Standard normal variate (Box-Muller, pair cached).
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0, 1] keeps the log finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_index(i + 1);
            items.swap(i, j);
        }
    }
}
