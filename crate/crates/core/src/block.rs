//! Likelihood ratio test for a block-diagonal covariance matrix and its
//! diagonal special case based on the sample correlation determinant.
//!
//! With `S` the (uncentered) sample covariance and `S_ii` its diagonal
//! blocks, the statistic is `log V_n = log|S| - sum_i log|S_ii|`. Under the
//! null hypothesis of uncorrelated blocks,
//!
//! ```text
//! (log V_n - mu_n) / sigma_n  ->  N(0, 1)
//! mu_n      = sum_i (n - p_i - 1/2) log(1 - p_i/n) - (n - p - 1/2) log(1 - p/n)
//! sigma_n^2 = 2 { sum_i log(1 - p_i/n) - log(1 - p/n) }
//! ```
//!
//! for any entry distribution with a finite `4 + delta` moment, and the test
//! rejects for small values of `log V_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    extract_block, log_det_cholesky, quad_forms_column_major, sample_covariance, BlockPartition,
    DataMatrix, SymmetricMatrix,
};
use crate::report::{check_alpha, TestReport};

/// Heuristic thresholds for the asymptotic-regime warnings.
pub const WARN_RATIO: f64 = 0.95;
pub const WARN_MAX_BLOCK_SHARE: f64 = 0.9;
pub const WARN_MIN_BLOCK_WEIGHT: f64 = 0.01;

/// How the determinants of `S` and its blocks are evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogDetRoute {
    /// Sequential projections of the variable vectors (no covariance matrix
    /// is formed).
    #[default]
    Projection,
    /// Cholesky factors of the sample covariance and its diagonal blocks.
    Cholesky,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockTestConstants {
    pub mu_n: f64,
    pub sigma_n: f64,
    pub n: usize,
    pub p: usize,
    pub partition: BlockPartition,
}

fn check_shape(data: &DataMatrix, part: &BlockPartition) -> Result<()> {
    if part.p() != data.p() {
        return Err(Error::DimensionMismatch {
            expected: data.p(),
            actual: part.p(),
        });
    }
    if data.p() >= data.n() {
        return Err(Error::DimensionExceedsSample {
            n: data.n(),
            p: data.p(),
        });
    }
    Ok(())
}

/// `log V_n` via the projection recursion.
pub fn log_vn(data: &DataMatrix, part: &BlockPartition) -> Result<f64> {
    log_vn_with(data, part, LogDetRoute::Projection)
}

pub fn log_vn_with(data: &DataMatrix, part: &BlockPartition, route: LogDetRoute) -> Result<f64> {
    check_shape(data, part)?;
    match route {
        LogDetRoute::Projection => {
            let n = data.n();
            let columns = data.to_column_major();
            let log_sum = |range| -> Result<f64> {
                Ok(quad_forms_column_major(&columns, n, range)?
                    .iter()
                    .map(|q| q.ln())
                    .sum())
            };
            let full = log_sum(0..data.p())?;
            let mut blocks = 0.0;
            for range in part.ranges() {
                blocks += log_sum(range)?;
            }
            Ok(full - blocks)
        }
        LogDetRoute::Cholesky => {
            let s = sample_covariance(data);
            log_vn_from_covariance(&s, part)
        }
    }
}

fn log_vn_from_covariance(s: &SymmetricMatrix, part: &BlockPartition) -> Result<f64> {
    let full = log_det_cholesky(s)?;
    let mut blocks = 0.0;
    for i in 0..part.q() {
        blocks += log_det_cholesky(&extract_block(s, part, i)?)?;
    }
    Ok(full - blocks)
}

/// Centering and scale of `log V_n` under the null hypothesis.
pub fn block_constants(n: usize, part: &BlockPartition) -> Result<BlockTestConstants> {
    let p = part.p();
    if part.q() < 2 {
        return Err(Error::InvalidDesign(format!(
            "at least two blocks are required, got {}",
            part.q()
        )));
    }
    if p >= n {
        return Err(Error::InvalidDesign(format!(
            "dimension p = {p} must be smaller than the sample size n = {n}"
        )));
    }
    let nf = n as f64;
    let log1m = |k: usize| (-(k as f64) / nf).ln_1p();
    let mut mu = -(nf - p as f64 - 0.5) * log1m(p);
    let mut var = -log1m(p);
    for &pi in part.sizes() {
        mu += (nf - pi as f64 - 0.5) * log1m(pi);
        var += log1m(pi);
    }
    let var = 2.0 * var;
    if !(var > 0.0) {
        return Err(Error::InvalidDesign(format!(
            "null variance {var} is not positive"
        )));
    }
    Ok(BlockTestConstants {
        mu_n: mu,
        sigma_n: var.sqrt(),
        n,
        p,
        partition: part.clone(),
    })
}

/// Regime diagnostics for the block test; warnings only, never errors.
pub fn assumption_warnings(n: usize, part: &BlockPartition) -> Vec<String> {
    let mut out = Vec::new();
    let (p, q) = (part.p() as f64, part.q() as f64);
    let nf = n as f64;
    if p / nf > WARN_RATIO {
        out.push(format!(
            "p/n = {:.4} exceeds {WARN_RATIO}: dimension is close to the sample size",
            p / nf
        ));
    }
    let max = *part.sizes().iter().max().unwrap() as f64;
    if max > WARN_MAX_BLOCK_SHARE * p {
        out.push(format!(
            "largest block holds {:.4} of the variables (above {WARN_MAX_BLOCK_SHARE})",
            max / p
        ));
    }
    let min = *part.sizes().iter().min().unwrap() as f64;
    if min * q / nf < WARN_MIN_BLOCK_WEIGHT {
        out.push(format!(
            "min block size * q / n = {:.4} is below {WARN_MIN_BLOCK_WEIGHT}",
            min * q / nf
        ));
    }
    out
}

/// One-sided test of `H0: Sigma_ij = 0 for i != j`.
pub fn block_test(data: &DataMatrix, part: &BlockPartition, alpha: f64) -> Result<TestReport> {
    block_test_with(data, part, alpha, LogDetRoute::Projection)
}

pub fn block_test_with(
    data: &DataMatrix,
    part: &BlockPartition,
    alpha: f64,
    route: LogDetRoute,
) -> Result<TestReport> {
    check_alpha(alpha)?;
    check_shape(data, part)?;
    let c = block_constants(data.n(), part)?;
    let stat = log_vn_with(data, part, route)?;
    Ok(TestReport::new(stat, c.mu_n, c.sigma_n, alpha)?
        .with_warnings(assumption_warnings(data.n(), part)))
}

/// `log |R|` for the sample correlation matrix `R = D^{-1/2} S D^{-1/2}`.
///
/// Evaluated through a Cholesky factor of `R`; it coincides with `log V_n`
/// for the partition into singletons.
pub fn log_det_correlation(data: &DataMatrix) -> Result<f64> {
    if data.p() >= data.n() {
        return Err(Error::DimensionExceedsSample {
            n: data.n(),
            p: data.p(),
        });
    }
    let s = sample_covariance(data);
    let diag = s.diag();
    if let Some(column) = diag.iter().position(|&v| !(v > f64::MIN_POSITIVE)) {
        return Err(Error::ZeroVariance { column });
    }
    let inv_sd: Vec<f64> = diag.iter().map(|v| 1.0 / v.sqrt()).collect();
    let r = SymmetricMatrix::from_fn(s.dim(), |i, j| {
        if i == j {
            1.0
        } else {
            s.get(i, j) * inv_sd[i] * inv_sd[j]
        }
    });
    log_det_cholesky(&r)
}

/// Constants for the diagonal-covariance test (`q = p` blocks of size one).
pub fn correlation_constants(n: usize, p: usize) -> Result<BlockTestConstants> {
    if p < 2 || p >= n {
        return Err(Error::InvalidDesign(format!(
            "need 2 <= p < n, got p = {p}, n = {n}"
        )));
    }
    let (nf, pf) = (n as f64, p as f64);
    let l1 = (-1.0 / nf).ln_1p();
    let lp = (-pf / nf).ln_1p();
    let mu = pf * (nf - 1.5) * l1 - (nf - pf - 0.5) * lp;
    let var = 2.0 * (pf * l1 - lp);
    Ok(BlockTestConstants {
        mu_n: mu,
        sigma_n: var.sqrt(),
        n,
        p,
        partition: BlockPartition::unit(p)?,
    })
}

/// One-sided test of `H0: R = I` (diagonal covariance).
pub fn correlation_test(data: &DataMatrix, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    if data.p() >= data.n() {
        return Err(Error::DimensionExceedsSample {
            n: data.n(),
            p: data.p(),
        });
    }
    let c = correlation_constants(data.n(), data.p())?;
    let stat = log_det_correlation(data)?;
    let part = BlockPartition::unit(data.p())?;
    Ok(TestReport::new(stat, c.mu_n, c.sigma_n, alpha)?
        .with_warnings(assumption_warnings(data.n(), &part)))
}
