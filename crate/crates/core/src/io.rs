//! JSON file formats and the small text parsers used by the command line.
//!
//! A pair file looks like
//!
//! ```json
//! { "p": { "n": 2, "data": [[1, 0], [0, 0]] },
//!   "q": { "n": 2, "data": [[0.25, 0.4330127018922193], [0.4330127018922193, 0.75]] } }
//! ```
//!
//! Numbers are written with the shortest representation that parses back to
//! the same double, so files round-trip bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::projection::ProjectionPair;

/// A square matrix as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub data: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &Matrix) -> Self {
        MatrixFile {
            n: m.rows(),
            data: m.to_rows(),
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.n == 0 {
            return Err(Error::Validation(
                "matrix dimension must be positive".into(),
            ));
        }
        if self.data.len() != self.n {
            return Err(Error::Validation(format!(
                "n = {} but data has {} rows",
                self.n,
                self.data.len()
            )));
        }
        if let Some((i, r)) = self
            .data
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != self.n)
        {
            return Err(Error::Validation(format!(
                "row {i} has {} entries, expected {}",
                r.len(),
                self.n
            )));
        }
        Matrix::from_rows(&self.data)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    pub p: MatrixFile,
    pub q: MatrixFile,
}

impl PairFile {
    pub fn from_pair(pair: &ProjectionPair) -> Self {
        PairFile {
            p: MatrixFile::from_matrix(pair.p()),
            q: MatrixFile::from_matrix(pair.q()),
        }
    }

    /// Syntax only: well-formed JSON with the expected fields.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn parse_str(s: &str) -> Result<Self> {
        PairFile::parse(s.as_bytes())
    }

    /// Shape checks only; the matrices need not be projections.
    pub fn to_matrices(&self) -> Result<(Matrix, Matrix)> {
        let p = self.p.to_matrix()?;
        let q = self.q.to_matrix()?;
        if p.rows() != q.rows() {
            return Err(Error::Validation(format!(
                "P is {0}x{0} but Q is {1}x{1}",
                p.rows(),
                q.rows()
            )));
        }
        Ok((p, q))
    }

    /// Shape checks plus projection validation at `tol`.
    pub fn to_pair(&self, tol: f64) -> Result<ProjectionPair> {
        let (p, q) = self.to_matrices()?;
        ProjectionPair::with_tol(p, q, tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite matrices serialize")
    }
}

/// Parses, shape-checks and validates a pair file in one go.
pub fn read_pair(bytes: &[u8], tol: f64) -> Result<ProjectionPair> {
    PairFile::parse(bytes)?.to_pair(tol)
}

/// Parses `"0.1, 0.5,0.9"` into finite doubles. An empty string is an
/// empty list.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("`{tok}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("`{tok}` is not finite")));
            }
            Ok(v)
        })
        .collect()
}

/// Parses the four trivial block sizes `"h1,h2,h5,h6"`.
pub fn parse_dims(s: &str) -> Result<[usize; 4]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!(
            "expected four comma-separated sizes h1,h2,h5,h6, got {}",
            parts.len()
        )));
    }
    let mut out = [0usize; 4];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p
            .parse()
            .map_err(|_| Error::Parse(format!("`{p}` is not a block size")))?;
    }
    Ok(out)
}
