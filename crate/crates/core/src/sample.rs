//! Seeded sampling helpers shared by the Monte-Carlo routines and the
//! experiment harness. Everything is deterministic under a fixed seed.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use alloc::vec::Vec;

/// Deterministic random source backed by ChaCha12.
pub struct SampleRng(ChaCha12Rng);

impl SampleRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        SampleRng(ChaCha12Rng::seed_from_u64(seed))
    }

    /// Independent stream for case `index` under a run-level seed.
    pub fn stream(seed: u64, index: u64) -> Self {
        // golden-ratio mixing keeps per-case streams decorrelated
        Self::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        #[allow(unused_imports)]
        use num_traits::Float;
        let u = loop {
            let u = self.uniform();
            if u > 0.0 {
                break u;
            }
        };
        let v = self.uniform();
        (-2.0 * u.ln()).sqrt() * (2.0 * core::f64::consts::PI * v).cos()
    }

    /// Vector of standard normals.
    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            xs.swap(i, j);
        }
    }
}
