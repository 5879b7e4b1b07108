//! Brute-force reference computations.
//!
//! Deliberately built on different algorithms from the main paths: LU with
//! partial pivoting instead of Cholesky, and explicit least-squares
//! projections instead of incremental orthogonalization. Agreement between
//! the two is the evidence the test suite relies on. Speed is irrelevant
//! here.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{BlockPartition, DataMatrix, SymmetricMatrix};

struct Lu {
    d: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

fn lu_decompose(d: usize, mut a: Vec<f64>) -> Result<Lu> {
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = scale * f64::EPSILON * d as f64;
    let mut perm: Vec<usize> = (0..d).collect();
    let mut sign = 1.0;
    for k in 0..d {
        let (piv, pmax) = (k..d)
            .map(|i| (i, a[i * d + k].abs()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if !(pmax > tol) {
            return Err(Error::SingularMatrix { pivot: k });
        }
        if piv != k {
            for j in 0..d {
                a.swap(k * d + j, piv * d + j);
            }
            perm.swap(k, piv);
            sign = -sign;
        }
        let akk = a[k * d + k];
        for i in k + 1..d {
            let f = a[i * d + k] / akk;
            a[i * d + k] = f;
            for j in k + 1..d {
                a[i * d + j] -= f * a[k * d + j];
            }
        }
    }
    Ok(Lu {
        d,
        lu: a,
        perm,
        sign,
    })
}

impl Lu {
    fn log_det(&self) -> (f64, f64) {
        let mut sign = self.sign;
        let mut log = 0.0;
        for k in 0..self.d {
            let u = self.lu[k * self.d + k];
            if u < 0.0 {
                sign = -sign;
            }
            log += u.abs().ln();
        }
        (log, sign)
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let d = self.d;
        let mut x: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..d {
            for j in 0..i {
                x[i] -= self.lu[i * d + j] * x[j];
            }
        }
        for i in (0..d).rev() {
            for j in i + 1..d {
                x[i] -= self.lu[i * d + j] * x[j];
            }
            x[i] /= self.lu[i * d + i];
        }
        x
    }
}

/// `(log |det A|, sign det A)` by LU with partial pivoting.
pub fn lu_log_det(a: &SymmetricMatrix) -> Result<(f64, f64)> {
    lu_log_det_dense(a.dim(), a.as_slice())
}

/// Same as [`lu_log_det`] for an arbitrary square row-major matrix.
pub fn lu_log_det_dense(d: usize, a: &[f64]) -> Result<(f64, f64)> {
    if a.len() != d * d {
        return Err(Error::ShapeMismatch {
            expected: d * d,
            actual: a.len(),
        });
    }
    Ok(lu_decompose(d, a.to_vec())?.log_det())
}

/// Explicit `(1/n) sum_k y_k y_k^T` restricted to `cols`, by a direct
/// triple loop.
fn naive_covariance(data: &DataMatrix, cols: std::ops::Range<usize>) -> Vec<f64> {
    let m = cols.len();
    let mut out = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            let mut s = 0.0;
            for k in 0..data.n() {
                s += data.get(k, cols.start + a) * data.get(k, cols.start + b);
            }
            out[a * m + b] = s / data.n() as f64;
        }
    }
    out
}

/// `log|S| - sum_i log|S_ii|` with every determinant taken by LU.
pub fn naive_log_vn(data: &DataMatrix, part: &BlockPartition) -> Result<f64> {
    if data.p() >= data.n() {
        return Err(Error::DimensionExceedsSample {
            n: data.n(),
            p: data.p(),
        });
    }
    if part.p() != data.p() {
        return Err(Error::DimensionMismatch {
            expected: data.p(),
            actual: part.p(),
        });
    }
    let (full, _) = lu_log_det_dense(data.p(), &naive_covariance(data, 0..data.p()))?;
    let mut blocks = 0.0;
    for r in part.ranges() {
        blocks += lu_log_det_dense(r.len(), &naive_covariance(data, r))?.0;
    }
    Ok(full - blocks)
}

/// Squared norm of `b_target` after least-squares projection onto
/// `span(b_j : j in basis)`.
fn explicit_residual(
    data: &DataMatrix,
    basis: std::ops::Range<usize>,
    target: usize,
) -> Result<f64> {
    let n = data.n();
    let b: Vec<f64> = data.column(target);
    if basis.is_empty() {
        return Ok(b.iter().map(|v| v * v).sum());
    }
    let cols: Vec<Vec<f64>> = basis.clone().map(|j| data.column(j)).collect();
    let m = cols.len();
    let mut gram = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for a in 0..m {
        for c in 0..m {
            gram[a * m + c] = (0..n).map(|k| cols[a][k] * cols[c][k]).sum();
        }
        rhs[a] = (0..n).map(|k| cols[a][k] * b[k]).sum();
    }
    let coef = lu_decompose(m, gram)
        .map_err(|_| Error::DegenerateColumn { column: target })?
        .solve(&rhs);
    let mut r2 = 0.0;
    for k in 0..n {
        let fitted: f64 = (0..m).map(|a| coef[a] * cols[a][k]).sum();
        r2 += (b[k] - fitted).powi(2);
    }
    if !(r2 > 0.0) {
        return Err(Error::DegenerateColumn { column: target });
    }
    Ok(r2)
}

/// Per-step quantities of the martingale decomposition of `log V_n`.
///
/// Indices are zero-based columns. `quad_forms[k] = b_k^T P(k-1) b_k`
/// (projection onto the complement of all preceding columns) and
/// `block_quad_forms[k]` projects only against the preceding columns of
/// `k`'s own block. `x_terms` and `block_x_terms` cover columns past the
/// first block:
///
/// ```text
/// X_k       = (quad_forms[k]       - (n - k))         / (n - k)
/// X_{g,k}   = (block_quad_forms[k] - (n - k + s_g))   / (n - k + s_g)
/// ```
///
/// with `s_g` the first column of block `g`, and
/// `sigma1_sum = 2 sum_k [1/(n - k) - 1/(n - k + s_g)]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticTrace {
    pub quad_forms: Vec<f64>,
    pub block_quad_forms: Vec<f64>,
    /// First column covered by `x_terms` (the size of the first block).
    pub first_column: usize,
    pub x_terms: Vec<f64>,
    pub block_x_terms: Vec<f64>,
    pub sigma1_sum: f64,
}

impl DiagnosticTrace {
    /// `sum_k (X_k - X_{g,k})`, the leading linear term of `log V_n - mu_n`.
    pub fn linear_term(&self) -> f64 {
        self.x_terms
            .iter()
            .zip(&self.block_x_terms)
            .map(|(x, xg)| x - xg)
            .sum()
    }
}

/// Closed-form `sum_k sigma^2_{n,1,k}` over columns past the first block.
pub fn sigma1_sum(n: usize, part: &BlockPartition) -> f64 {
    let nf = n as f64;
    let first = part.sizes()[0];
    (first..part.p())
        .map(|k| {
            let start = part.cumulative()[part.block_of(k).unwrap()] as f64;
            let a = nf - k as f64;
            2.0 * (1.0 / a - 1.0 / (a + start))
        })
        .sum()
}

pub fn martingale_trace(data: &DataMatrix, part: &BlockPartition) -> Result<DiagnosticTrace> {
    if data.p() >= data.n() {
        return Err(Error::DimensionExceedsSample {
            n: data.n(),
            p: data.p(),
        });
    }
    if part.p() != data.p() {
        return Err(Error::DimensionMismatch {
            expected: data.p(),
            actual: part.p(),
        });
    }
    let (n, p) = (data.n() as f64, data.p());
    let mut quad_forms = Vec::with_capacity(p);
    let mut block_quad_forms = Vec::with_capacity(p);
    for k in 0..p {
        let start = part.cumulative()[part.block_of(k).unwrap()];
        quad_forms.push(explicit_residual(data, 0..k, k)?);
        block_quad_forms.push(explicit_residual(data, start..k, k)?);
    }
    let first = part.sizes()[0];
    let mut x_terms = Vec::with_capacity(p - first);
    let mut block_x_terms = Vec::with_capacity(p - first);
    for k in first..p {
        let start = part.cumulative()[part.block_of(k).unwrap()] as f64;
        let a = n - k as f64;
        x_terms.push((quad_forms[k] - a) / a);
        block_x_terms.push((block_quad_forms[k] - (a + start)) / (a + start));
    }
    Ok(DiagnosticTrace {
        quad_forms,
        block_quad_forms,
        first_column: first,
        x_terms,
        block_x_terms,
        sigma1_sum: sigma1_sum(data.n(), part),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_signed_diagonal() {
        assert_eq!(
            lu_log_det(&SymmetricMatrix::identity(4)).unwrap(),
            (0.0, 1.0)
        );
        let (l, s) = lu_log_det(&SymmetricMatrix::diagonal(&[-2.0, 3.0])).unwrap();
        assert!((l - 6f64.ln()).abs() < 1e-15);
        assert_eq!(s, -1.0);
    }

    #[test]
    fn pivoting_and_singularity() {
        // needs a row swap; det = -2
        let (l, s) = lu_log_det_dense(2, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((l - 2f64.ln()).abs() < 1e-15);
        assert_eq!(s, -1.0);
        assert!(matches!(
            lu_log_det_dense(2, &[1.0, 2.0, 2.0, 4.0]),
            Err(Error::SingularMatrix { pivot: 1 })
        ));
    }

    #[test]
    fn naive_statistic_trivial_cases() {
        let d = DataMatrix::from_rows(&[
            vec![1.0, 0.0, 2.0],
            vec![0.0, 3.0, 1.0],
            vec![2.0, 1.0, 0.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        let one = BlockPartition::new(vec![3]).unwrap();
        assert!(naive_log_vn(&d, &one).unwrap().abs() < 1e-14);
        let blockdiag =
            DataMatrix::from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let part = BlockPartition::unit(2).unwrap();
        assert!(naive_log_vn(&blockdiag, &part).unwrap().abs() < 1e-15);
    }

    #[test]
    fn trace_shapes_and_positivity() {
        let d = crate::sampling::sample_entry_matrix(
            30,
            8,
            crate::sampling::DistributionSpec::StandardNormal,
            3,
            0,
        )
        .unwrap();
        let part = BlockPartition::new(vec![3, 2, 3]).unwrap();
        let t = martingale_trace(&d, &part).unwrap();
        assert_eq!(t.quad_forms.len(), 8);
        assert_eq!(t.x_terms.len(), 5);
        assert_eq!(t.first_column, 3);
        // Within the first block both projections coincide.
        for k in 0..3 {
            assert!((t.quad_forms[k] - t.block_quad_forms[k]).abs() < 1e-10);
        }
        assert!(t.x_terms.iter().all(|x| 1.0 + x > 0.0));
        assert!(t.block_x_terms.iter().all(|x| 1.0 + x > 0.0));
    }
}
