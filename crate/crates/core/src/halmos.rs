//! Six-subspace canonical form of a pair of orthogonal projections.
//!
//! For a pair `(P, Q)` on `Rⁿ` the space splits as `H₁ ⊕ … ⊕ H₆` with
//!
//! | block | subspace                 | `P` | `Q`                  |
//! |-------|--------------------------|-----|----------------------|
//! | `H₁`  | `R(P) ∩ R(Q)`            | `I` | `I`                  |
//! | `H₂`  | `R(P) ∩ N(Q)`            | `I` | `0`                  |
//! | `H₃`  | rest of `R(P)`           | `I` | `Q₀`                 |
//! | `H₄`  | rest of `N(P)`           | `0` | `D*(I − Q₀)D`        |
//! | `H₅`  | `N(P) ∩ N(Q)`            | `0` | `0`                  |
//! | `H₆`  | `N(P) ∩ R(Q)`            | `0` | `I`                  |
//!
//! and `Q` couples `H₃` and `H₄` through `Q₀^{1/2}(I − Q₀)^{1/2}D`. `Q₀` is a
//! positive contraction without eigenvalues `0` or `1`, and `D` is an
//! orthogonal map from `H₄` onto `H₃`.
//!
//! [`decompose`] recovers this data from eigendecompositions of `Q`
//! compressed to `R(P)` and to `N(P)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mat_mul, sym_eigen, Matrix, DEFAULT_EIGEN_TOL};
use crate::projection::ProjectionPair;

pub const DEFAULT_CLASS_TOL: f64 = 1e-8;

/// Allowed mismatch between an `H₄` eigenvalue and `1 − λ` for its `H₃`
/// partner.
pub const PAIRING_TOL: f64 = 1e-7;

/// Allowed `‖DᵀD − I‖_F`.
pub const UNITARITY_TOL: f64 = 1e-8;

/// Dimensions `(h₁, …, h₆)` of the six canonical subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalmosDims(pub [usize; 6]);

impl HalmosDims {
    pub fn new(h1: usize, h2: usize, h3: usize, h4: usize, h5: usize, h6: usize) -> Self {
        HalmosDims([h1, h2, h3, h4, h5, h6])
    }

    pub fn h1(&self) -> usize {
        self.0[0]
    }
    pub fn h2(&self) -> usize {
        self.0[1]
    }
    pub fn h3(&self) -> usize {
        self.0[2]
    }
    pub fn h4(&self) -> usize {
        self.0[3]
    }
    pub fn h5(&self) -> usize {
        self.0[4]
    }
    pub fn h6(&self) -> usize {
        self.0[5]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Column offset of block `k` (0-based) in the canonical basis.
    pub fn offset(&self, k: usize) -> usize {
        self.0[..k].iter().sum()
    }

    pub fn rank_p(&self) -> usize {
        self.h1() + self.h2() + self.h3()
    }
}

/// Canonical data of a projection pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HalmosForm {
    dims: HalmosDims,
    basis_u: Matrix,
    q0_eigs: Vec<f64>,
    d: Matrix,
    class_tol: f64,
}

impl HalmosForm {
    /// Assembles a form from raw parts, checking the structural invariants.
    pub fn from_parts(
        dims: HalmosDims,
        basis_u: Matrix,
        q0_eigs: Vec<f64>,
        d: Matrix,
        class_tol: f64,
    ) -> Result<Self> {
        let n = dims.total();
        if dims.h3() != dims.h4() {
            return Err(Error::Validation(format!(
                "h3 = {} differs from h4 = {}",
                dims.h3(),
                dims.h4()
            )));
        }
        if basis_u.rows() != n || basis_u.cols() != n {
            return Err(Error::Shape(format!(
                "basis is {}x{}, dims sum to {n}",
                basis_u.rows(),
                basis_u.cols()
            )));
        }
        if q0_eigs.len() != dims.h3() || d.rows() != dims.h3() || d.cols() != dims.h4() {
            return Err(Error::Shape(format!(
                "{} Q0 eigenvalues and a {}x{} D for h3 = {}",
                q0_eigs.len(),
                d.rows(),
                d.cols(),
                dims.h3()
            )));
        }
        if q0_eigs.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Validation("Q0 eigenvalues must ascend".into()));
        }
        if let Some(bad) = q0_eigs
            .iter()
            .find(|&&l| !(l > class_tol && l < 1.0 - class_tol))
        {
            return Err(Error::Validation(format!(
                "Q0 eigenvalue {bad} is not inside ({class_tol}, 1 − {class_tol})"
            )));
        }
        let uu = mat_mul(&basis_u.transpose(), &basis_u)?;
        let dev = uu.sub(&Matrix::identity(n))?.frobenius_norm();
        if dev > 1e-9 * (n.max(1) as f64) {
            return Err(Error::Validation(format!(
                "basis is not orthogonal: ‖UᵀU − I‖_F = {dev:e}"
            )));
        }
        let form = HalmosForm {
            dims,
            basis_u,
            q0_eigs,
            d,
            class_tol,
        };
        let du = form.d_unitarity_residual();
        if du > UNITARITY_TOL * (dims.h3().max(1) as f64) {
            return Err(Error::Degenerate(format!(
                "D is not orthogonal: ‖DᵀD − I‖_F = {du:e}"
            )));
        }
        Ok(form)
    }

    /// A form already expressed in its canonical basis (`U = I`).
    pub fn canonical(dims: HalmosDims, q0_eigs: Vec<f64>, d: Matrix) -> Result<Self> {
        let n = dims.total();
        HalmosForm::from_parts(dims, Matrix::identity(n), q0_eigs, d, DEFAULT_CLASS_TOL)
    }

    pub fn dims(&self) -> HalmosDims {
        self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.total()
    }

    /// Orthogonal change of basis; columns grouped `H₁, …, H₆`.
    pub fn basis_u(&self) -> &Matrix {
        &self.basis_u
    }

    /// Eigenvalues of `Q₀`, ascending.
    pub fn q0_eigs(&self) -> &[f64] {
        &self.q0_eigs
    }

    /// The orthogonal map `H₄ → H₃` in the chosen eigenbases.
    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn class_tol(&self) -> f64 {
        self.class_tol
    }

    /// Columns of `U` spanning block `k` (0-based: `0` is `H₁`).
    pub fn block_basis(&self, k: usize) -> Matrix {
        let start = self.dims.offset(k);
        let idx: Vec<usize> = (start..start + self.dims.0[k]).collect();
        self.basis_u.select_columns(&idx)
    }

    /// `‖DᵀD − I‖_F`.
    pub fn d_unitarity_residual(&self) -> f64 {
        let dtd = mat_mul(&self.d.transpose(), &self.d).expect("D is h3 x h4");
        dtd.sub(&Matrix::identity(self.d.cols()))
            .expect("square")
            .frobenius_norm()
    }
}

/// Classification of one compression spectrum into low / interior / high.
struct Split {
    low: Vec<usize>,
    interior: Vec<usize>,
    high: Vec<usize>,
}

fn split_spectrum(values: &[f64], tol: f64) -> Split {
    let mut s = Split {
        low: Vec::new(),
        interior: Vec::new(),
        high: Vec::new(),
    };
    for (i, &v) in values.iter().enumerate() {
        if v <= tol {
            s.low.push(i);
        } else if v >= 1.0 - tol {
            s.high.push(i);
        } else {
            s.interior.push(i);
        }
    }
    s
}

/// Computes the canonical form of a validated pair.
///
/// `class_tol` decides which compression eigenvalues count as `0` or `1`.
pub fn decompose(pair: &ProjectionPair, class_tol: f64) -> Result<HalmosForm> {
    if !(class_tol > 0.0 && class_tol < 0.5) {
        return Err(Error::Domain(format!(
            "class_tol {class_tol} must lie in (0, 1/2)"
        )));
    }
    let n = pair.dim();
    let rank = pair.rank_p();
    let q = pair.q();

    // range and null space of P
    let eig_p = sym_eigen(pair.p(), DEFAULT_EIGEN_TOL)?;
    let null_idx: Vec<usize> = (0..n - rank).collect();
    let range_idx: Vec<usize> = (n - rank..n).collect();
    if rank < n && eig_p.values[n - rank - 1] > 0.5 || rank > 0 && eig_p.values[n - rank] < 0.5 {
        return Err(Error::Validation(format!(
            "spectrum of P does not split into {rank} ones and {} zeros",
            n - rank
        )));
    }
    let range_p = eig_p.vectors.select_columns(&range_idx);
    let null_p = eig_p.vectors.select_columns(&null_idx);

    let compress = |b: &Matrix| -> Result<Matrix> {
        Ok(mat_mul(&mat_mul(&b.transpose(), q)?, b)?.symmetrized())
    };
    let eig_a = sym_eigen(&compress(&range_p)?, DEFAULT_EIGEN_TOL)?;
    let eig_c = sym_eigen(&compress(&null_p)?, DEFAULT_EIGEN_TOL)?;

    let sa = split_spectrum(&eig_a.values, class_tol);
    let sc = split_spectrum(&eig_c.values, class_tol);
    if sa.interior.len() != sc.interior.len() {
        return Err(Error::Classification(format!(
            "{} interior eigenvalues on R(P) but {} on N(P) at class_tol {class_tol:e}; \
             try a different tolerance",
            sa.interior.len(),
            sc.interior.len()
        )));
    }

    let q0_eigs: Vec<f64> = sa.interior.iter().map(|&i| eig_a.values[i]).collect();
    // ascending λ on H₃ pairs with descending 1 − λ on H₄
    let h4_idx: Vec<usize> = sc.interior.iter().rev().copied().collect();
    for (&lam, &j) in q0_eigs.iter().zip(&h4_idx) {
        let mu = eig_c.values[j];
        if (mu - (1.0 - lam)).abs() > PAIRING_TOL {
            return Err(Error::Classification(format!(
                "H4 eigenvalue {mu} does not pair with 1 − {lam}"
            )));
        }
    }

    let in_range = |idx: &[usize]| mat_mul(&range_p, &eig_a.vectors.select_columns(idx));
    let in_null = |idx: &[usize]| mat_mul(&null_p, &eig_c.vectors.select_columns(idx));
    let b1 = in_range(&sa.high)?;
    let b2 = in_range(&sa.low)?;
    let b3 = in_range(&sa.interior)?;
    let b4 = in_null(&h4_idx)?;
    let b5 = in_null(&sc.low)?;
    let b6 = in_null(&sc.high)?;

    // Q's H₃→H₄ coupling is Q₀^{1/2}(I − Q₀)^{1/2}·D. The row scale
    // √(λ(1−λ)) equals ‖(I − P)Q b₃ᵢ‖, which is measured directly: forming
    // it from λ loses all accuracy once λ is within rounding of 0 or 1.
    let b3t_q = mat_mul(&b3.transpose(), q)?;
    let mut d = mat_mul(&b3t_q, &b4)?;
    let leak = mat_mul(&b3t_q, &null_p)?;
    for i in 0..d.rows() {
        let s = leak.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
        for j in 0..d.cols() {
            d[(i, j)] /= s;
        }
    }

    let dims = HalmosDims::new(
        b1.cols(),
        b2.cols(),
        b3.cols(),
        b4.cols(),
        b5.cols(),
        b6.cols(),
    );
    let basis_u = Matrix::hconcat(&[&b1, &b2, &b3, &b4, &b5, &b6])?;
    HalmosForm::from_parts(dims, basis_u, q0_eigs, d, class_tol)
}

/// The block matrices of `P` and `Q` in the canonical basis.
pub fn canonical_reassemble(form: &HalmosForm) -> (Matrix, Matrix) {
    let dims = form.dims();
    let n = dims.total();
    let k = dims.h3();
    let mut p = Matrix::zeros(n, n);
    for i in 0..dims.rank_p() {
        p[(i, i)] = 1.0;
    }

    let mut q = Matrix::zeros(n, n);
    for i in 0..dims.h1() {
        q[(i, i)] = 1.0;
    }
    for i in dims.offset(5)..n {
        q[(i, i)] = 1.0;
    }
    let o3 = dims.offset(2);
    let o4 = dims.offset(3);
    let lam = form.q0_eigs();
    let d = form.d();
    // off-diagonal block R·D with R = diag(√(λ(1−λ)))
    let mut rd = d.clone();
    for i in 0..k {
        let r = (lam[i] * (1.0 - lam[i])).sqrt();
        for j in 0..k {
            rd[(i, j)] *= r;
        }
    }
    // Dᵀ(I − Q₀)D
    let mut lower = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            lower[(i, j)] = (0..k).map(|l| d[(l, i)] * (1.0 - lam[l]) * d[(l, j)]).sum();
        }
    }
    q.set_block(o3, o3, &Matrix::from_diag(lam));
    q.set_block(o3, o4, &rd);
    q.set_block(o4, o3, &rd.transpose());
    q.set_block(o4, o4, &lower);
    (p, q)
}

/// Frobenius distances between `UᵀPU`, `UᵀQU` and the canonical blocks.
pub fn reconstruction_residual(form: &HalmosForm, pair: &ProjectionPair) -> Result<(f64, f64)> {
    if form.n() != pair.dim() {
        return Err(Error::Shape(format!(
            "form has dimension {} but pair has {}",
            form.n(),
            pair.dim()
        )));
    }
    let (pc, qc) = canonical_reassemble(form);
    let u = form.basis_u();
    let ut = u.transpose();
    let rp = mat_mul(&mat_mul(&ut, pair.p())?, u)?
        .sub(&pc)?
        .frobenius_norm();
    let rq = mat_mul(&mat_mul(&ut, pair.q())?, u)?
        .sub(&qc)?
        .frobenius_norm();
    Ok((rp, rq))
}
