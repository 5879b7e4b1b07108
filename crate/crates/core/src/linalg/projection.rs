//! Determinants of Gram matrices through sequential projections.
//!
//! For variable vectors `b_a, ..., b_b` (columns of the data matrix, each an
//! `n`-vector) the Gram determinant factorizes as
//!
//! ```text
//! det(B^T B) = prod_i  b_i^T P(a; i-1) b_i
//! ```
//!
//! where `P(a; i-1)` projects onto the orthogonal complement of
//! `span(b_a, ..., b_{i-1})`. Each factor is the squared residual norm of
//! `b_i` after removing its components along an orthonormal basis of the
//! preceding columns, so the projectors never have to be formed: the basis is
//! grown one vector at a time by modified Gram-Schmidt, with a second pass
//! whenever the residual loses more than a factor `1/sqrt(2)` of its norm.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::DataMatrix;

/// Squared residual norms `b_i^T P(a; i-1) b_i` for every column in `cols`,
/// in column order.
pub fn projection_quad_forms(data: &DataMatrix, cols: Range<usize>) -> Result<Vec<f64>> {
    check_range(data, &cols)?;
    let columns = data.to_column_major();
    quad_forms_column_major(&columns, data.n(), cols)
}

/// `log det(B^T B)` over the column range via the projection recursion.
///
/// Equals `log det(n * sample_covariance)` restricted to the range.
pub fn log_det_incremental(data: &DataMatrix, cols: Range<usize>) -> Result<f64> {
    Ok(projection_quad_forms(data, cols)?
        .iter()
        .map(|q| q.ln())
        .sum())
}

pub(crate) fn check_range(data: &DataMatrix, cols: &Range<usize>) -> Result<()> {
    if cols.start >= cols.end || cols.end > data.p() {
        return Err(Error::IndexOutOfRange {
            index: cols.end,
            len: data.p(),
        });
    }
    if cols.len() > data.n() {
        return Err(Error::DimensionExceedsSample {
            n: data.n(),
            p: cols.len(),
        });
    }
    Ok(())
}

/// Core recursion on column-major storage (`columns[j*n..(j+1)*n]` is
/// variable `j`).
pub(crate) fn quad_forms_column_major(
    columns: &[f64],
    n: usize,
    cols: Range<usize>,
) -> Result<Vec<f64>> {
    let eps2 = f64::EPSILON * f64::EPSILON;
    let mut basis: Vec<f64> = Vec::with_capacity(cols.len() * n);
    let mut out = Vec::with_capacity(cols.len());
    let mut v = vec![0.0; n];
    for col in cols {
        v.copy_from_slice(&columns[col * n..(col + 1) * n]);
        let norm0 = dot(&v, &v);
        orthogonalize(&mut v, &basis, n);
        let mut r2 = dot(&v, &v);
        if r2 < 0.5 * norm0 {
            orthogonalize(&mut v, &basis, n);
            r2 = dot(&v, &v);
        }
        if !(r2 > n as f64 * eps2 * norm0) {
            return Err(Error::DegenerateColumn { column: col });
        }
        out.push(r2);
        let inv = 1.0 / r2.sqrt();
        basis.extend(v.iter().map(|x| x * inv));
    }
    Ok(out)
}

fn orthogonalize(v: &mut [f64], basis: &[f64], n: usize) {
    for q in basis.chunks_exact(n) {
        let c = dot(q, v);
        for (vi, qi) in v.iter_mut().zip(q) {
            *vi -= c * qi;
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
