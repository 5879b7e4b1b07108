use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

/// Lower-triangular Cholesky factor, row-major `d x d`.
pub fn cholesky(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    let d = a.dim();
    let mut l = vec![0.0; d * d];
    for j in 0..d {
        let mut pivot = a.get(j, j);
        for k in 0..j {
            pivot -= l[j * d + k] * l[j * d + k];
        }
        if !(pivot > 0.0 && pivot.is_finite()) {
            return Err(Error::NotPositiveDefinite {
                pivot: j,
                value: pivot,
            });
        }
        let ljj = pivot.sqrt();
        l[j * d + j] = ljj;
        for i in j + 1..d {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = s / ljj;
        }
    }
    Ok(l)
}

/// `log det A = sum_i 2 log L_ii` for symmetric positive definite `A`.
pub fn log_det_cholesky(a: &SymmetricMatrix) -> Result<f64> {
    let d = a.dim();
    let l = cholesky(a)?;
    Ok((0..d).map(|i| 2.0 * l[i * d + i].ln()).sum())
}
