//! Spectra of `PQP` and of the anticommutator `PQ + QP`.
//!
//! Every interior eigenvalue `λ` of `Q₀` contributes the pair `λ ± √λ` to the
//! spectrum of `PQ + QP`; `H₁` contributes `2` and `H₂ ⊕ H₅ ⊕ H₆` contribute
//! `0`. In finite dimension this is an equality of multisets, which is what
//! [`predicted_anticommutator_spectrum`] returns. The looser two-sided
//! inclusion phrased purely through `σ(PQP)` is checked by
//! [`check_theorem_inclusions`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halmos::HalmosForm;
use crate::linalg::{operator_norm, sym_eigen, Matrix, DEFAULT_EIGEN_TOL};
use crate::projection::ProjectionPair;

pub const DEFAULT_MATCH_TOL: f64 = 1e-8;

/// Lower end of every anticommutator spectrum.
pub const SPECTRUM_MIN: f64 = -0.25;
/// Upper end of every anticommutator spectrum.
pub const SPECTRUM_MAX: f64 = 2.0;

/// Eigenvalues with multiplicity, kept in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMultiset {
    values: Vec<f64>,
    #[serde(default = "default_match_tol")]
    match_tol: f64,
}

fn default_match_tol() -> f64 {
    DEFAULT_MATCH_TOL
}

impl SpectrumMultiset {
    /// Sorts `values`; rejects non-finite entries.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("spectrum has a non-finite value".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(SpectrumMultiset {
            values,
            match_tol: DEFAULT_MATCH_TOL,
        })
    }

    pub fn with_match_tol(mut self, tol: f64) -> Self {
        self.match_tol = tol;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn match_tol(&self) -> f64 {
        self.match_tol
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// `(λ + √λ, λ − √λ)`.
pub fn forward_map(lambda: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("λ = {lambda} is outside [0, 1]")));
    }
    let r = lambda.sqrt();
    Ok((lambda + r, lambda - r))
}

/// Which of `λ ± √λ` produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

/// A preimage `λ ∈ [0, 1]` of an anticommutator eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preimage {
    pub lambda: f64,
    pub branch: Branch,
}

/// All `λ ∈ [0, 1]` with `λ + √λ = μ` or `λ − √λ = μ`, ordered by `λ`.
///
/// Positive `μ` has one preimage on the plus branch. Negative `μ` has two
/// on the minus branch, `√λ = (1 ∓ √(1 + 4μ))/2`, which merge at `μ = −1/4`.
/// `μ = 0` is hit by `λ = 0` on both branches and by `λ = 1` on the minus
/// branch.
pub fn inverse_map(mu: f64) -> Result<Vec<Preimage>> {
    if !(SPECTRUM_MIN..=SPECTRUM_MAX).contains(&mu) {
        return Err(Error::Domain(format!("μ = {mu} is outside [−1/4, 2]")));
    }
    let disc = (1.0 + 4.0 * mu).max(0.0).sqrt();
    if mu > 0.0 {
        let t = (disc - 1.0) / 2.0;
        return Ok(vec![Preimage {
            lambda: (t * t).min(1.0),
            branch: Branch::Plus,
        }]);
    }
    if mu == 0.0 {
        return Ok(vec![
            Preimage {
                lambda: 0.0,
                branch: Branch::Plus,
            },
            Preimage {
                lambda: 0.0,
                branch: Branch::Minus,
            },
            Preimage {
                lambda: 1.0,
                branch: Branch::Minus,
            },
        ]);
    }
    let lo = (1.0 - disc) / 2.0;
    let hi = (1.0 + disc) / 2.0;
    let mut out = vec![Preimage {
        lambda: lo * lo,
        branch: Branch::Minus,
    }];
    if hi != lo {
        out.push(Preimage {
            lambda: hi * hi,
            branch: Branch::Minus,
        });
    }
    Ok(out)
}

/// `{2 × h₁} ∪ {0 × (h₂ + h₅ + h₆)} ∪ {λ ± √λ : λ ∈ σ(Q₀)}`.
pub fn predicted_anticommutator_spectrum(form: &HalmosForm) -> SpectrumMultiset {
    let dims = form.dims();
    let mut values = Vec::with_capacity(form.n());
    values.extend(std::iter::repeat_n(2.0, dims.h1()));
    values.extend(std::iter::repeat_n(0.0, dims.h2() + dims.h5() + dims.h6()));
    for &lam in form.q0_eigs() {
        let r = lam.sqrt();
        values.push(lam + r);
        values.push(lam - r);
    }
    SpectrumMultiset::new(values).expect("interior eigenvalues are finite")
}

/// `{1 × h₁} ∪ {0 × (h₂ + h₄ + h₅ + h₆)} ∪ σ(Q₀)`.
pub fn predicted_pqp_spectrum(form: &HalmosForm) -> SpectrumMultiset {
    let dims = form.dims();
    let mut values = Vec::with_capacity(form.n());
    values.extend(std::iter::repeat_n(1.0, dims.h1()));
    values.extend(std::iter::repeat_n(
        0.0,
        dims.h2() + dims.h4() + dims.h5() + dims.h6(),
    ));
    values.extend_from_slice(form.q0_eigs());
    SpectrumMultiset::new(values).expect("interior eigenvalues are finite")
}

/// Brute force: eigenvalues of the explicitly formed `PQ + QP`.
pub fn oracle_anticommutator_spectrum(pair: &ProjectionPair) -> Result<SpectrumMultiset> {
    let eig = sym_eigen(&pair.anticommutator(), DEFAULT_EIGEN_TOL)?;
    SpectrumMultiset::new(eig.values)
}

/// Brute force: eigenvalues of the explicitly formed `PQP`.
pub fn oracle_pqp_spectrum(pair: &ProjectionPair) -> Result<SpectrumMultiset> {
    let eig = sym_eigen(&pair.pqp(), DEFAULT_EIGEN_TOL)?;
    SpectrumMultiset::new(eig.values)
}

/// The `H₃ ⊕ H₄` block `W = [[2Q₀, Q₀^{1/2}(I−Q₀)^{1/2}D], [·ᵀ, 0]]` of the
/// anticommutator in the canonical basis.
pub fn w_block(form: &HalmosForm) -> Matrix {
    let k = form.dims().h3();
    let mut w = Matrix::zeros(2 * k, 2 * k);
    let lam = form.q0_eigs();
    let d = form.d();
    for i in 0..k {
        w[(i, i)] = 2.0 * lam[i];
        let r = (lam[i] * (1.0 - lam[i])).sqrt();
        for j in 0..k {
            w[(i, k + j)] = r * d[(i, j)];
            w[(k + j, i)] = r * d[(i, j)];
        }
    }
    w
}

/// Outcome of checking both inclusions relating `σ(PQP)` and `σ(PQ + QP)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    /// `{λ ± √λ : λ ∈ σ(PQP), λ ∉ {0, 1}} ⊆ σ(PQ + QP)`.
    pub lower_ok: bool,
    /// `σ(PQ + QP) ⊆ {λ ± √λ : λ ∈ σ(PQP)} ∪ {0, 2}`.
    pub upper_ok: bool,
    pub lower_distance: f64,
    pub upper_distance: f64,
    pub max_unmatched_distance: f64,
    /// Predicted points missing from the anticommutator spectrum.
    pub lower_witnesses: Vec<f64>,
    /// Anticommutator eigenvalues not explained by `σ(PQP)`.
    pub upper_witnesses: Vec<f64>,
}

fn distance_to_sorted(x: f64, sorted: &[f64]) -> f64 {
    let i = sorted.partition_point(|&v| v < x);
    let mut best = f64::INFINITY;
    if i < sorted.len() {
        best = best.min((sorted[i] - x).abs());
    }
    if i > 0 {
        best = best.min((x - sorted[i - 1]).abs());
    }
    best
}

/// Checks both inclusions at tolerance `tol` using brute-force spectra of
/// `PQP` and `PQ + QP`.
///
/// Eigenvalues of `PQP` within `tol` of `0` or `1` are excluded from the
/// lower inclusion. `form` is accepted so that callers pair the check with a
/// decomposition of the same pair; it is only used for a dimension check.
pub fn check_theorem_inclusions(
    pair: &ProjectionPair,
    form: &HalmosForm,
    tol: f64,
) -> Result<InclusionReport> {
    if form.n() != pair.dim() {
        return Err(Error::Shape(format!(
            "form has dimension {} but pair has {}",
            form.n(),
            pair.dim()
        )));
    }
    let pqp = oracle_pqp_spectrum(pair)?;
    let anti = oracle_anticommutator_spectrum(pair)?;

    let images = |lam: f64| {
        let lam = lam.clamp(0.0, 1.0);
        let r = lam.sqrt();
        [lam + r, lam - r]
    };

    let mut lower_witnesses = Vec::new();
    let mut lower_distance: f64 = 0.0;
    for &lam in pqp.values() {
        if lam <= tol || lam >= 1.0 - tol {
            continue;
        }
        for mu in images(lam) {
            let d = distance_to_sorted(mu, anti.values());
            lower_distance = lower_distance.max(d);
            if d > tol {
                lower_witnesses.push(mu);
            }
        }
    }

    let mut allowed: Vec<f64> = pqp.values().iter().flat_map(|&l| images(l)).collect();
    allowed.extend([0.0, 2.0]);
    allowed.sort_by(f64::total_cmp);
    let mut upper_witnesses = Vec::new();
    let mut upper_distance: f64 = 0.0;
    for &mu in anti.values() {
        let d = distance_to_sorted(mu, &allowed);
        upper_distance = upper_distance.max(d);
        if d > tol {
            upper_witnesses.push(mu);
        }
    }

    Ok(InclusionReport {
        lower_ok: lower_witnesses.is_empty(),
        upper_ok: upper_witnesses.is_empty(),
        lower_distance,
        upper_distance,
        max_unmatched_distance: lower_distance.max(upper_distance),
        lower_witnesses,
        upper_witnesses,
    })
}

/// Both sides of `‖PQ + QP‖ = ‖PQ‖² + ‖PQ‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl NormCheck {
    pub fn deviation(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn check_norm_formula(pair: &ProjectionPair, tol: f64) -> Result<NormCheck> {
    let lhs = operator_norm(&pair.anticommutator())?;
    let pq = operator_norm(&pair.pq())?;
    let rhs = pq * pq + pq;
    Ok(NormCheck {
        lhs,
        rhs,
        ok: (lhs - rhs).abs() <= tol,
    })
}

/// Whether every value lies in `[−1/4 − tol, 2 + tol]`.
pub fn check_bound(spectrum: &SpectrumMultiset, tol: f64) -> bool {
    match (spectrum.min(), spectrum.max()) {
        (Some(lo), Some(hi)) => lo >= SPECTRUM_MIN - tol && hi <= SPECTRUM_MAX + tol,
        _ => true,
    }
}

/// The two factors `λ − (λ₀ + √λ₀)` and `λ − (λ₀ − √λ₀)`.
pub fn schur_factors(lambda: f64, lambda0: f64) -> (f64, f64) {
    let r = lambda0.sqrt();
    (lambda - (lambda0 + r), lambda - (lambda0 - r))
}

/// Scalar residual of the Schur complement factorization of `W − λ`.
///
/// For each `λ₀` three expressions of the Schur complement of the `−λ`
/// block are evaluated:
///
/// * `2λ₀ − λ + λ₀(1 − λ₀)/λ` (the complement itself),
/// * `(λ(2λ₀ − λ) + λ₀(1 − λ₀))/λ`,
/// * `−(λ − (λ₀ + √λ₀))(λ − (λ₀ − √λ₀))/λ`,
///
/// and the largest pairwise discrepancy over all `λ₀` is returned.
pub fn schur_factorization_residual(lambda: f64, q0_eigs: &[f64]) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "Schur complement needs a finite nonzero λ, got {lambda}"
        )));
    }
    let mut worst: f64 = 0.0;
    for &l0 in q0_eigs {
        if !(l0 > 0.0 && l0 < 1.0) {
            return Err(Error::Domain(format!("λ₀ = {l0} is outside (0, 1)")));
        }
        let complement = 2.0 * l0 - lambda + l0 * (1.0 - l0) / lambda;
        let expanded = (lambda * (2.0 * l0 - lambda) + l0 * (1.0 - l0)) / lambda;
        let (fp, fm) = schur_factors(lambda, l0);
        let factored = -(fp * fm) / lambda;
        worst = worst
            .max((complement - expanded).abs())
            .max((expanded - factored).abs())
            .max((complement - factored).abs());
    }
    Ok(worst)
}
