//! Seeded pseudo-random streams.
//!
//! The generator is xoshiro256++ (Blackman & Vigna), seeded from a 64-bit value
//! by expanding it with SplitMix64 into the 256-bit state, exactly as
//! `rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64` does. Both algorithms have
//! public-domain reference implementations in C, so a port in another language
//! reproduces every stream given the rules below:
//!
//! * uniform `[0, 1)`: `(next_u64() >> 11) as f64 * 2^-53`;
//! * integers in `0..n`: rejection on `next_u64() % n` (see [`SimRng::below`]);
//! * normal: Box-Muller on two uniforms, no cached second variate;
//! * exponential: `-ln(1 - u) / rate`;
//! * Poisson: Knuth's product method, means above 30 split into chunks of 30;
//! * derived seeds: [`Seed::derive`].

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function applied to `z`.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent child seed for sub-stream `tag`:
    /// `mix64(seed + GOLDEN_GAMMA * (tag + 1))`.
    pub fn derive(self, tag: u64) -> Seed {
        Seed(mix64(self.0.wrapping_add(
            GOLDEN_GAMMA.wrapping_mul(tag.wrapping_add(1)),
        )))
    }

    pub fn rng(self) -> SimRng {
        SimRng::new(self)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// A deterministic random stream. Owned by one consumer at a time.
#[derive(Debug, Clone)]
pub struct SimRng {
    inner: Xoshiro256PlusPlus,
}

impl SimRng {
    pub fn new(seed: Seed) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed.0),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_uniform()
    }

    /// Unbiased integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        loop {
            let x = self.next_u64();
            let r = x % n;
            if x - r <= u64::MAX - (n - 1) {
                return r;
            }
        }
    }

    /// Integer uniform on the closed range `lo..=hi`.
    pub fn int_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_uniform() < p
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        -(1.0 - self.next_uniform()).ln() / rate
    }

    pub fn poisson(&mut self, mean: f64) -> u64 {
        const CHUNK: f64 = 30.0;
        let mut remaining = mean;
        let mut total = 0;
        while remaining > 0.0 {
            let m = remaining.min(CHUNK);
            remaining -= m;
            let limit = (-m).exp();
            let mut k = 0;
            let mut prod = self.next_uniform();
            while prod > limit {
                k += 1;
                prod *= self.next_uniform();
            }
            total += k;
        }
        total
    }

    /// Fisher-Yates, drawing from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
