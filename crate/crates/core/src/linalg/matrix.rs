use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observations stored row by row: `n` samples of a `p`-dimensional vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values, rejecting empty shapes and
    /// non-finite entries.
    pub fn from_row_major(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::EmptyMatrix { rows: n, cols: p });
        }
        if values.len() != n * p {
            return Err(Error::ShapeMismatch {
                expected: n * p,
                actual: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: idx / p,
                col: idx % p,
            });
        }
        Ok(Self { n, p, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * p);
        for row in rows {
            if row.len() != p {
                return Err(Error::ShapeMismatch {
                    expected: p,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_row_major(n, p, values)
    }

    /// Sample size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.p + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.p..(row + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Copies variable `col` into a contiguous `n`-vector.
    pub fn column(&self, col: usize) -> Vec<f64> {
        self.rows().map(|r| r[col]).collect()
    }

    /// Column-major copy: variable `j` occupies `[j * n, (j + 1) * n)`.
    pub fn to_column_major(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.p];
        for (i, row) in self.rows().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                out[j * self.n + i] = v;
            }
        }
        out
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.n {
            return Err(Error::IndexOutOfRange {
                index: end,
                len: self.n,
            });
        }
        Ok(Self {
            n: end - start,
            p: self.p,
            values: self.values[start * self.p..end * self.p].to_vec(),
        })
    }

    /// Row-wise linear map `x -> f(x)` producing a matrix of the same shape.
    pub(crate) fn map_rows(&self, mut f: impl FnMut(&[f64], &mut [f64])) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for (src, dst) in self.rows().zip(values.chunks_exact_mut(self.p)) {
            f(src, dst);
        }
        Self {
            n: self.n,
            p: self.p,
            values,
        }
    }
}

/// Dense symmetric matrix, stored in full with both triangles mirrored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    d: usize,
    values: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Evaluates `f` on the upper triangle (`i <= j`) and mirrors it.
    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v = f(i, j);
                values[i * d + j] = v;
                values[j * d + i] = v;
            }
        }
        Self { d, values }
    }

    /// Accepts a full row-major matrix only if it is exactly symmetric.
    pub fn from_row_major(d: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
        }
        if values.len() != d * d {
            return Err(Error::ShapeMismatch {
                expected: d * d,
                actual: values.len(),
            });
        }
        for i in 0..d {
            for j in 0..i {
                let (a, b) = (values[i * d + j], values[j * d + i]);
                if !a.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if a != b {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
            if !values[i * d + i].is_finite() {
                return Err(Error::NonFinite { row: i, col: i });
            }
        }
        Ok(Self { d, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let mut values = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::ShapeMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_row_major(d, values)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.d).map(|i| self.get(i, i)).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Multiplies every entry by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            d: self.d,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// Dense row-major product `self * other` (not symmetrized).
    pub fn matmul(&self, other: &Self) -> Vec<f64> {
        let d = self.d;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                for j in 0..d {
                    out[i * d + j] += a * other.get(k, j);
                }
            }
        }
        out
    }
}
