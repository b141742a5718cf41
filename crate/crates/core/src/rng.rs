//! Seedable randomness shared by every sampler and experiment.
//!
//! The generator is ChaCha8, a counter-based stream cipher RNG: identical
//! seeds give identical `u64` streams on every platform, and all
//! floating-point variates are derived deterministically from that stream.
//! Normal variates use Box-Muller and consume exactly two uniforms per
//! call so stream alignment is stable.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// An angle in radians, kept in the half-open interval `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    /// Wraps an arbitrary radian value into `[0, 2*pi)`.
    pub fn from_radians(value: f64) -> Self {
        let mut v = value.rem_euclid(TAU);
        // rem_euclid can round up to TAU for tiny negative inputs
        if v >= TAU {
            v = 0.0;
        }
        Angle(v)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    /// Angle sum modulo `2*pi` (the group law on rotation angles).
    pub fn wrapping_add(self, other: Angle) -> Angle {
        Angle::from_radians(self.0 + other.0)
    }

    /// The inverse rotation angle.
    pub fn negated(self) -> Angle {
        Angle::from_radians(-self.0)
    }
}

/// Deterministic RNG state. One value per logical task; parallel trials use
/// independently seeded streams (`seed = base_seed + trial_index`).
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The stream for trial `index` relative to this state's base seed.
    pub fn trial_stream(&self, index: u64) -> RngState {
        RngState::from_seed(self.seed.wrapping_add(index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[0, 1)` using the top 53 bits of one `u64` draw.
    pub fn uniform_unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform angle on `[0, 2*pi)`.
    pub fn uniform_angle(&mut self) -> Angle {
        let v = TAU * self.uniform_unit();
        // 2*pi * (1 - 2^-53) can round up to 2*pi
        Angle(if v >= TAU { 0.0 } else { v })
    }

    /// One standard normal variate (Box-Muller, two uniforms per call).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform_unit();
        let u2 = self.uniform_unit();
        // u1 = 0 occurs with probability 2^-53; the guard keeps log finite
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        r * (TAU * u2).cos()
    }

    /// A fair sign, `+1.0` or `-1.0`.
    pub fn rademacher(&mut self) -> f64 {
        if self.inner.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}
