//! Construction of projection pairs with prescribed canonical data or
//! prescribed anticommutator eigenvalues.
//!
//! Pairs are assembled directly in canonical block form with `Q₀` diagonal
//! and `D = I`:
//!
//! ```text
//! P = I_h1 ⊕ I_h2 ⊕ I_k ⊕ 0_k ⊕ 0_h5 ⊕ 0_h6
//! Q = I_h1 ⊕ 0_h2 ⊕ [[Q₀, R], [R, I − Q₀]] ⊕ 0_h5 ⊕ I_h6,   R = √(Q₀(I − Q₀))
//! ```
//!
//! and optionally conjugated by one random orthogonal matrix.
//!
//! A `Q₀` eigenvalue `λ` always contributes both `λ + √λ` and `λ − √λ`, so a
//! realized spectrum *contains* the requested targets but generally has
//! extra points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mat_mul, Matrix};
use crate::projection::{random_orthogonal, ProjectionPair};
use crate::random::GaussianSource;
use crate::spectral::{inverse_map, Branch};

/// Canonical data for [`build_pair`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SynthesisSpec {
    pub q0_targets: Vec<f64>,
    pub h1: usize,
    pub h2: usize,
    pub h5: usize,
    pub h6: usize,
    pub conjugate_seed: Option<u64>,
}

impl SynthesisSpec {
    pub fn from_q0(q0_targets: Vec<f64>) -> Self {
        SynthesisSpec {
            q0_targets,
            ..Default::default()
        }
    }

    pub fn with_dims(mut self, h1: usize, h2: usize, h5: usize, h6: usize) -> Self {
        self.h1 = h1;
        self.h2 = h2;
        self.h5 = h5;
        self.h6 = h6;
        self
    }

    pub fn with_conjugation(mut self, seed: u64) -> Self {
        self.conjugate_seed = Some(seed);
        self
    }

    /// `h₁ + h₂ + h₅ + h₆ + 2k`.
    pub fn dim(&self) -> usize {
        self.h1 + self.h2 + self.h5 + self.h6 + 2 * self.q0_targets.len()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.q0_targets.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
            return Err(Error::Domain(format!(
                "Q0 target {bad} is not strictly inside (0, 1)"
            )));
        }
        if self.dim() == 0 {
            return Err(Error::Domain(
                "synthesis spec describes an empty space".into(),
            ));
        }
        Ok(())
    }
}

pub fn build_pair(spec: &SynthesisSpec) -> Result<ProjectionPair> {
    spec.validate()?;
    let n = spec.dim();
    let k = spec.q0_targets.len();
    let (o3, o4) = (spec.h1 + spec.h2, spec.h1 + spec.h2 + k);
    let o6 = o4 + k + spec.h5;

    let mut p = Matrix::zeros(n, n);
    for i in 0..o4 {
        p[(i, i)] = 1.0;
    }
    let mut q = Matrix::zeros(n, n);
    for i in (0..spec.h1).chain(o6..n) {
        q[(i, i)] = 1.0;
    }
    for (i, &lam) in spec.q0_targets.iter().enumerate() {
        let r = (lam * (1.0 - lam)).sqrt();
        q[(o3 + i, o3 + i)] = lam;
        q[(o4 + i, o4 + i)] = 1.0 - lam;
        q[(o3 + i, o4 + i)] = r;
        q[(o4 + i, o3 + i)] = r;
    }

    if let Some(seed) = spec.conjugate_seed {
        let o = random_orthogonal(n, &mut GaussianSource::new(seed))?;
        let ot = o.transpose();
        p = mat_mul(&mat_mul(&o, &p)?, &ot)?.symmetrized();
        q = mat_mul(&mat_mul(&o, &q)?, &ot)?.symmetrized();
    }
    ProjectionPair::new(p, q)
}

/// Which `λ` to use when a target has two preimages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreimagePolicy {
    #[default]
    Smallest,
    Largest,
}

/// Targets closer than this map to one shared `Q₀` eigenvalue.
const DEDUP_TOL: f64 = 1e-12;

/// Synthesis data whose pair has every target in its anticommutator
/// spectrum. `2` becomes an `H₁` dimension and `0` an `H₅` dimension.
pub fn spec_for_targets(targets: &[f64], policy: PreimagePolicy) -> Result<SynthesisSpec> {
    let mut spec = SynthesisSpec::default();
    let mut lambdas: Vec<f64> = Vec::new();
    for &mu in targets {
        if mu == 2.0 {
            spec.h1 += 1;
            continue;
        }
        if mu == 0.0 {
            spec.h5 += 1;
            continue;
        }
        let pre = inverse_map(mu)?;
        let candidates = pre
            .iter()
            .filter(|p| p.lambda > 0.0 && p.lambda < 1.0)
            .filter(|p| mu > 0.0 || p.branch == Branch::Minus);
        let chosen = match policy {
            PreimagePolicy::Smallest => candidates.min_by(|a, b| a.lambda.total_cmp(&b.lambda)),
            PreimagePolicy::Largest => candidates.max_by(|a, b| a.lambda.total_cmp(&b.lambda)),
        };
        match chosen {
            Some(p) => lambdas.push(p.lambda),
            // targets within rounding of 0 or 2 whose preimage hit the boundary
            None if mu > 1.0 => spec.h1 += 1,
            None => spec.h5 += 1,
        }
    }
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup_by(|a, b| (*a - *b).abs() <= DEDUP_TOL);
    spec.q0_targets = lambdas;
    Ok(spec)
}

pub fn realize_spectrum(targets: &[f64], policy: PreimagePolicy) -> Result<ProjectionPair> {
    build_pair(&spec_for_targets(targets, policy)?)
}

/// Spec of [`grid_realization`]: `Q₀ = {(j/m)² : j = 1..m−1}`, `h₁ = h₂ = 1`.
pub fn grid_spec(m: usize) -> Result<SynthesisSpec> {
    if m < 2 {
        return Err(Error::Domain(format!(
            "grid size must be at least 2, got {m}"
        )));
    }
    let q0 = (1..m).map(|j| (j as f64 / m as f64).powi(2)).collect();
    Ok(SynthesisSpec::from_q0(q0).with_dims(1, 1, 0, 0))
}

/// A pair whose anticommutator spectrum is within `3/m` of `[−1/4, 2]` in
/// Hausdorff distance.
pub fn grid_realization(m: usize) -> Result<ProjectionPair> {
    build_pair(&grid_spec(m)?)
}
