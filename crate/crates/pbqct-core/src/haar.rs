//! Seeded Haar-random pure states.
//!
//! A Haar-random state is a vector of independent standard complex Gaussians,
//! normalized; the distribution is invariant under any fixed unitary. The
//! generator is ChaCha12, so a seed pins the exact sample stream across runs.

use crate::error::Result;
use crate::linalg::StateVector;
use crate::C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::TAU;

/// Stream of Haar-random states. Not shared across workers: each worker owns
/// a sampler seeded for its own stream.
pub struct HaarSampler {
    rng: ChaCha12Rng,
}

impl HaarSampler {
    pub fn new(seed: u64) -> Self {
        HaarSampler {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// One standard complex Gaussian via Box-Muller.
    fn gaussian(&mut self) -> C64 {
        let u1: f64 = 1.0 - self.rng.random::<f64>(); // (0, 1]
        let u2: f64 = self.rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        C64::new(r * (TAU * u2).cos(), r * (TAU * u2).sin())
    }

    pub fn state(&mut self, dim: usize) -> Result<StateVector> {
        loop {
            let amps: Vec<C64> = (0..dim).map(|_| self.gaussian()).collect();
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-12 {
                let inv = 1.0 / norm;
                return StateVector::unit(amps.iter().map(|z| z * inv).collect(), None);
            }
        }
    }
}

/// One-shot sample: deterministic in `(dim, seed)`.
pub fn haar_state(dim: usize, seed: u64) -> Result<StateVector> {
    HaarSampler::new(seed).state(dim)
}
