//! Dense real matrices, Gram–Schmidt orthonormalization and a cyclic Jacobi
//! eigensolver for symmetric matrices.
//!
//! Everything here is deliberately small: matrices are row-major `Vec<f64>`
//! buffers and all routines are `O(n^3)` textbook algorithms. Sizes in this
//! crate rarely exceed a few hundred.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative off-diagonal tolerance for [`sym_eigen`].
pub const DEFAULT_EIGEN_TOL: f64 = 1e-12;

/// Hard cap on Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;

/// Relative asymmetry accepted by [`sym_eigen`] and the symmetric path of
/// [`operator_norm`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Columns whose norm drops below this after elimination are treated as
/// linearly dependent by [`orthonormal_columns`].
pub const RANK_TOL: f64 = 1e-10;

/// Dense real matrix stored in row-major order.
///
/// Zero-sized shapes (`0 x k`, `k x 0`) are allowed so that empty blocks can
/// be carried through block bookkeeping uniformly.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row slices. All rows must share a length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {ncols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(nrows, ncols, data)
    }

    /// Builds a `rows x columns.len()` matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Shape(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Rows as nested vectors, the layout used by the JSON file formats.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mat_mul(&self, other: &Matrix) -> Result<Matrix> {
        mat_mul(self, other)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `‖A − Aᵀ‖_F`; only meaningful for square matrices.
    pub fn symmetry_residual(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                let d = self[(i, j)] - self[(j, i)];
                acc += d * d;
            }
        }
        acc.sqrt()
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> Matrix {
        let mut s = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m[(i, k)] = self[(i, j)];
            }
        }
        m
    }

    /// Concatenates matrices with equal row counts side by side.
    pub fn hconcat(blocks: &[&Matrix]) -> Result<Matrix> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if let Some(b) = blocks.iter().find(|b| b.rows != rows) {
            return Err(Error::Shape(format!(
                "cannot concatenate blocks with {} and {rows} rows",
                b.rows
            )));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            m.set_block(0, offset, b);
            offset += b.cols;
        }
        Ok(m)
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// `max |a_ij - b_ij|`, or `inf` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut c = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let out = &mut c.data[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, &bkj) in out.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(c)
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V · diag(values) · Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            for i in 0..n {
                let vik = self.vectors[(i, k)] * lam;
                if vik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)];
                }
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm is at most
/// `tol · ‖a‖_F`, or fail after [`MAX_SWEEPS`]. The input is symmetrized
/// before iterating; inputs whose asymmetry exceeds
/// [`SYMMETRY_TOL`]` · ‖a‖_F` are rejected.
pub fn sym_eigen(a: &Matrix, tol: f64) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::Validation(format!(
            "eigensolver needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let scale = a.frobenius_norm();
    let asym = a.symmetry_residual();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::Validation(format!(
            "matrix is not symmetric: ‖A−Aᵀ‖_F = {asym:e}"
        )));
    }

    let n = a.rows;
    let mut m = a.symmetrized();
    let mut v = Matrix::identity(n);
    let threshold = tol * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        let residual = off_diagonal_norm(&m);
        if residual > threshold {
            return Err(Error::Convergence {
                sweeps: MAX_SWEEPS,
                residual,
            });
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their diagonal position order
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    Ok(EigenDecomposition {
        values: order.iter().map(|&i| diag[i]).collect(),
        vectors: v.select_columns(&order),
    })
}

/// Applies `A ← JᵀAJ`, `V ← VJ` for the plane rotation
/// `J_pp = J_qq = c, J_pq = s, J_qp = −s`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.rows;
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = c * akp - s * akq;
        m[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = c * apk - s * aqk;
        m[(q, k)] = s * apk + c * aqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Orthonormal basis of the column span of `a` via modified Gram–Schmidt
/// with one reorthogonalization pass.
pub fn orthonormal_columns(a: &Matrix) -> Result<Matrix> {
    if a.rows < a.cols {
        return Err(Error::Shape(format!(
            "{}x{} matrix cannot have independent columns",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(a.cols);
    for j in 0..a.cols {
        let mut w = a.column(j);
        for _pass in 0..2 {
            for b in &basis {
                let proj: f64 = b.iter().zip(&w).map(|(x, y)| x * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= proj * bi;
                }
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= RANK_TOL {
            return Err(Error::Rank {
                column: j,
                residual: norm,
            });
        }
        w.iter_mut().for_each(|x| *x /= norm);
        basis.push(w);
    }
    Matrix::from_columns(n, &basis)
}

/// Spectral norm.
///
/// Symmetric inputs use `max |eigenvalue|`; everything else uses the square
/// root of the largest eigenvalue of `AᵀA`.
pub fn operator_norm(a: &Matrix) -> Result<f64> {
    if a.rows == 0 || a.cols == 0 {
        return Ok(0.0);
    }
    if a.is_square() && a.symmetry_residual() <= SYMMETRY_TOL * a.frobenius_norm() {
        let eig = sym_eigen(a, DEFAULT_EIGEN_TOL)?;
        return Ok(spectral_radius(&eig.values));
    }
    let gram = mat_mul(&a.transpose(), a)?;
    let eig = sym_eigen(&gram, DEFAULT_EIGEN_TOL)?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// `max(|first|, |last|)` of an ascending list; `0` when empty.
pub fn spectral_radius(ascending: &[f64]) -> f64 {
    match (ascending.first(), ascending.last()) {
        (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S3: f64 = 0.4330127018922193; // √3/4

    fn worked_q() -> Matrix {
        Matrix::from_rows(&[[0.25, S3], [S3, 0.75]]).unwrap()
    }

    #[test]
    fn identity_times_matrix() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]).unwrap();
        assert_eq!(mat_mul(&Matrix::identity(3), &a).unwrap(), a);
    }

    #[test]
    fn orthogonal_diagonals_multiply_to_zero() {
        let c = mat_mul(
            &Matrix::from_diag(&[1.0, 0.0]),
            &Matrix::from_diag(&[0.0, 1.0]),
        )
        .unwrap();
        assert_eq!(c, Matrix::zeros(2, 2));
    }

    #[test]
    fn worked_pair_product() {
        let p = Matrix::from_diag(&[1.0, 0.0]);
        let pq = mat_mul(&p, &worked_q()).unwrap();
        let expected = Matrix::from_rows(&[[0.25, S3], [0.0, 0.0]]).unwrap();
        assert!(pq.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn mat_mul_shape_error() {
        let err = mat_mul(&Matrix::zeros(2, 3), &Matrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn non_finite_entries_rejected() {
        assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::from_rows(&[[f64::INFINITY]]).is_err());
        assert!(matches!(
            Matrix::new(2, 2, vec![0.0; 3]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn eigen_of_diagonal() {
        let e = sym_eigen(&Matrix::from_diag(&[3.0, 1.0, 2.0]), DEFAULT_EIGEN_TOL).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vectors.column(0), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn eigen_of_reflection() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let e = sym_eigen(&a, DEFAULT_EIGEN_TOL).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_of_worked_anticommutator() {
        // λ² − λ/2 − 3/16 = 0
        let a = Matrix::from_rows(&[[0.5, S3], [S3, 0.0]]).unwrap();
        let e = sym_eigen(&a, DEFAULT_EIGEN_TOL).unwrap();
        assert!((e.values[0] + 0.25).abs() < 1e-15);
        assert!((e.values[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn eigen_ties_keep_diagonal_order() {
        let e = sym_eigen(&Matrix::from_diag(&[1.0, 0.0, 1.0, 0.0]), DEFAULT_EIGEN_TOL).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(e.vectors.column(0), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(e.vectors.column(1), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(e.vectors.column(2), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn eigen_rejects_bad_input() {
        assert!(matches!(
            sym_eigen(&Matrix::zeros(2, 3), 1e-12),
            Err(Error::Validation(_))
        ));
        let asym = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eigen(&asym, 1e-12), Err(Error::Validation(_))));
    }

    #[test]
    fn eigen_of_empty_and_zero() {
        let e = sym_eigen(&Matrix::zeros(0, 0), 1e-12).unwrap();
        assert!(e.values.is_empty());
        let e = sym_eigen(&Matrix::zeros(3, 3), 1e-12).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
    }

    #[test]
    fn orthonormalize_examples() {
        let b = orthonormal_columns(&Matrix::from_rows(&[[2.0], [0.0]]).unwrap()).unwrap();
        assert_eq!(b, Matrix::from_rows(&[[1.0], [0.0]]).unwrap());

        let a = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let b = orthonormal_columns(&a).unwrap();
        let e = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        for j in 0..2 {
            let dot: f64 = b
                .column(j)
                .iter()
                .zip(e.column(j))
                .map(|(x, y)| x * y)
                .sum();
            assert!((dot.abs() - 1.0).abs() < 1e-15);
        }

        let q = Matrix::from_rows(&[[0.6, -0.8], [0.8, 0.6]]).unwrap();
        let b = orthonormal_columns(&q).unwrap();
        assert!(b.max_abs_diff(&q) < 1e-15);
    }

    #[test]
    fn orthonormalize_rank_deficient() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [1.0, 2.0]]).unwrap();
        assert!(matches!(
            orthonormal_columns(&a),
            Err(Error::Rank { column: 1, .. })
        ));
        assert!(matches!(
            orthonormal_columns(&Matrix::zeros(1, 2)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(operator_norm(&Matrix::identity(4)).unwrap(), 1.0);
        let pq = Matrix::from_rows(&[[0.25, S3], [0.0, 0.0]]).unwrap();
        assert!((operator_norm(&pq).unwrap() - 0.5).abs() < 1e-15);
        let w = Matrix::from_rows(&[[0.5, S3], [S3, 0.0]]).unwrap();
        assert!((operator_norm(&w).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(operator_norm(&Matrix::zeros(0, 3)).unwrap(), 0.0);
    }
}
