use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

const MAX_SWEEPS: usize = 30;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenvalues and row-major eigenvectors (column `k` of `vectors` belongs
/// to `values[k]`).
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `1e-12 * ||A||_F`, at most 30 sweeps.
pub fn symmetric_eigen(a: &SymmetricMatrix) -> Result<SymmetricEigen> {
    let d = a.dim();
    let mut m = a.as_slice().to_vec();
    let mut v = SymmetricMatrix::identity(d).as_slice().to_vec();
    let target = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    s += m[i * d + j] * m[i * d + j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off_norm(&m) <= target;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * d + p];
                let aqq = m[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
                m[p * d + q] = 0.0;
                m[q * d + p] = 0.0;

                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
        sweep += 1;
        converged = off_norm(&m) <= target;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }
    Ok(SymmetricEigen {
        values: (0..d).map(|i| m[i * d + i]).collect(),
        vectors: v,
    })
}

/// Symmetric positive semidefinite square root `B` with `B B = A`.
///
/// Eigenvalues in `[-tol, 0)` with `tol = 64 d eps max|lambda|` are treated as
/// rounding noise and clamped to zero.
pub fn symmetric_sqrt(a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let d = a.dim();
    let eig = symmetric_eigen(a)?;
    let scale = eig.values.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let tol = 64.0 * d as f64 * f64::EPSILON * scale;
    let mut roots = Vec::with_capacity(d);
    for &l in &eig.values {
        if l < -tol {
            return Err(Error::NegativeEigenvalue { value: l });
        }
        roots.push(l.max(0.0).sqrt());
    }
    let v = &eig.vectors;
    Ok(SymmetricMatrix::from_fn(d, |i, j| {
        (0..d).map(|k| v[i * d + k] * roots[k] * v[j * d + k]).sum()
    }))
}

/// Closed-form square root of the compound-symmetry matrix
/// `(1 - delta) I + delta 11^T`.
///
/// The matrix has eigenvalue `1 - delta` on the complement of `1` and
/// `1 - delta + p delta` along `1`, so its root is `a I + b 11^T` with
/// `a = sqrt(1 - delta)` and `b = (sqrt(1 - delta + p delta) - a) / p`.
pub fn compound_symmetry_sqrt(delta: f64, p: usize) -> Result<SymmetricMatrix> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidDesign(format!(
            "compound symmetry parameter {delta} outside [0, 1)"
        )));
    }
    if p == 0 {
        return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
    }
    let (a, b) = compound_symmetry_root_coefficients(delta, p);
    Ok(SymmetricMatrix::from_fn(
        p,
        |i, j| if i == j { a + b } else { b },
    ))
}

pub(crate) fn compound_symmetry_root_coefficients(delta: f64, p: usize) -> (f64, f64) {
    let a = (1.0 - delta).sqrt();
    let b = ((1.0 - delta + p as f64 * delta).sqrt() - a) / p as f64;
    (a, b)
}

/// `(1 - delta) I + delta 11^T`.
pub fn compound_symmetry(delta: f64, p: usize) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(p, |i, j| if i == j { 1.0 } else { delta })
}
