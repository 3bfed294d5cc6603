//! Reproducible pseudo-normal variates.
//!
//! The generator is fixed so that seeds replay identically across runs:
//!
//! * uniform bits come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//!   `SeedableRng::seed_from_u64(seed)`;
//! * a uniform double in `(0, 1]` is `((x >> 11) + 1) · 2⁻⁵³` for a 64-bit
//!   output `x`;
//! * normals are produced in pairs by the Box–Muller transform
//!   `√(−2 ln u₁) · (cos 2πu₂, sin 2πu₂)`, filling matrices row-major.
//!
//! Sub-seeds are derived with the SplitMix64 finalizer, see [`derive_seed`].

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of `seed`:
/// `splitmix64(seed + (index + 1) · γ)` with `γ = 0x9E3779B97F4A7C15`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Seeded source of uniform integers and standard normal variates.
#[derive(Debug, Clone)]
pub struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn new(seed: u64) -> Self {
        GaussianSource {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform double in `(0, 1]`.
    pub fn next_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `lo..=hi` by modulo reduction; the bias is
    /// negligible for the small spans used here.
    pub fn uniform_int(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + (self.rng.next_u64() % span) as usize
    }

    /// Uniform double in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * u
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_unit();
        let u2 = self.next_unit();
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = std::f64::consts::TAU * u2;
        self.spare = Some(r * phi.sin());
        r * phi.cos()
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let data: Vec<f64> = (0..rows * cols).map(|_| self.next_normal()).collect();
        Matrix::new(rows, cols, data).expect("Box–Muller output is finite")
    }
}
