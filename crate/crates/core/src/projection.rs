//! Orthogonal projection matrices and random pairs of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mat_mul, orthonormal_columns, Matrix};
use crate::random::GaussianSource;

pub const DEFAULT_VALIDATION_TOL: f64 = 1e-10;

/// A trace further than this from an integer cannot be a projection rank.
pub const TRACE_INTEGRALITY_TOL: f64 = 1e-6;

/// Residuals of the two defining identities `P = Pᵀ` and `P² = P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDiagnostics {
    pub symmetry_residual: f64,
    pub idempotency_residual: f64,
    pub pass: bool,
}

/// Checks `‖A − Aᵀ‖_F ≤ tol·n` and `‖A² − A‖_F ≤ tol·n`.
pub fn validate_projection(a: &Matrix, tol: f64) -> Result<ProjectionDiagnostics> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "projection must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows() as f64;
    let symmetry_residual = a.symmetry_residual();
    let idempotency_residual = mat_mul(a, a)?.sub(a)?.frobenius_norm();
    Ok(ProjectionDiagnostics {
        symmetry_residual,
        idempotency_residual,
        pass: symmetry_residual <= tol * n && idempotency_residual <= tol * n,
    })
}

/// `B·Bᵀ` for a basis `B` with orthonormal columns.
pub fn projection_from_basis(b: &Matrix) -> Result<Matrix> {
    let gram = mat_mul(&b.transpose(), b)?;
    let dev = gram.sub(&Matrix::identity(b.cols()))?.frobenius_norm();
    if dev > 1e-10 {
        return Err(Error::Validation(format!(
            "basis columns are not orthonormal: ‖BᵀB − I‖_F = {dev:e}"
        )));
    }
    Ok(mat_mul(b, &b.transpose())?.symmetrized())
}

/// A validated pair of same-size orthogonal projections.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPair {
    p: Matrix,
    q: Matrix,
    validation_tol: f64,
}

impl ProjectionPair {
    pub fn new(p: Matrix, q: Matrix) -> Result<Self> {
        Self::with_tol(p, q, DEFAULT_VALIDATION_TOL)
    }

    pub fn with_tol(p: Matrix, q: Matrix, validation_tol: f64) -> Result<Self> {
        if p.rows() != q.rows() || p.cols() != q.cols() {
            return Err(Error::Shape(format!(
                "P is {}x{} but Q is {}x{}",
                p.rows(),
                p.cols(),
                q.rows(),
                q.cols()
            )));
        }
        for (name, m) in [("P", &p), ("Q", &q)] {
            let diag = validate_projection(m, validation_tol)?;
            if !diag.pass {
                return Err(Error::Validation(format!(
                    "{name} is not an orthogonal projection: symmetry residual {:e}, idempotency residual {:e}",
                    diag.symmetry_residual, diag.idempotency_residual
                )));
            }
            let tr = m.trace();
            if (tr - tr.round()).abs() > TRACE_INTEGRALITY_TOL {
                return Err(Error::Validation(format!(
                    "{name} has non-integral trace {tr}"
                )));
            }
        }
        Ok(ProjectionPair {
            p,
            q,
            validation_tol,
        })
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    pub fn validation_tol(&self) -> f64 {
        self.validation_tol
    }

    pub fn rank_p(&self) -> usize {
        self.p.trace().round().max(0.0) as usize
    }

    pub fn rank_q(&self) -> usize {
        self.q.trace().round().max(0.0) as usize
    }

    pub fn pq(&self) -> Matrix {
        mat_mul(&self.p, &self.q).expect("pair shares a dimension")
    }

    pub fn qp(&self) -> Matrix {
        mat_mul(&self.q, &self.p).expect("pair shares a dimension")
    }

    /// `PQP`, symmetrized.
    pub fn pqp(&self) -> Matrix {
        mat_mul(&self.pq(), &self.p)
            .expect("pair shares a dimension")
            .symmetrized()
    }

    /// The anticommutator `PQ + QP`.
    pub fn anticommutator(&self) -> Matrix {
        let pq = self.pq();
        pq.add(&pq.transpose()).expect("square").symmetrized()
    }

    pub fn into_parts(self) -> (Matrix, Matrix) {
        (self.p, self.q)
    }
}

/// Projection onto a Haar-random `rank`-dimensional subspace of `Rⁿ`.
///
/// Ranks `0` and `n` return the exact zero and identity matrices.
pub fn random_projection(n: usize, rank: usize, source: &mut GaussianSource) -> Result<Matrix> {
    if rank > n {
        return Err(Error::Domain(format!("rank {rank} exceeds dimension {n}")));
    }
    if rank == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    if rank == n {
        return Ok(Matrix::identity(n));
    }
    let basis = orthonormal_columns(&source.gaussian_matrix(n, rank))?;
    projection_from_basis(&basis)
}

/// Haar-random orthogonal `n x n` matrix.
pub fn random_orthogonal(n: usize, source: &mut GaussianSource) -> Result<Matrix> {
    orthonormal_columns(&source.gaussian_matrix(n, n))
}

/// Deterministic random pair: `P` is drawn first, then `Q`, from one stream
/// seeded with `seed`.
pub fn random_projection_pair(
    n: usize,
    rank_p: usize,
    rank_q: usize,
    seed: u64,
) -> Result<ProjectionPair> {
    if rank_p > n || rank_q > n {
        return Err(Error::Domain(format!(
            "ranks ({rank_p}, {rank_q}) must lie in 0..={n}"
        )));
    }
    let mut source = GaussianSource::new(seed);
    let p = random_projection(n, rank_p, &mut source)?;
    let q = random_projection(n, rank_q, &mut source)?;
    ProjectionPair::new(p, q)
}
