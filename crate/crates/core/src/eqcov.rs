//! Likelihood ratio test for equality of `q` covariance matrices.
//!
//! Group `j` contributes `n_j` centered observations with scatter matrix
//! `A_j`; the pooled scatter is `A = sum_j A_j` and `n = sum_j n_j`:
//!
//! ```text
//! 2 log Lambda = sum_j n_j log|A_j / n_j| - n log|A / n|
//! ```
//!
//! Under the null hypothesis `2 log Lambda` is centered by
//! `mu_n = n (n - p - 1/2) log(1 - p/n) - sum_j n_j (n_j - p - 1/2) log(1 - p/n_j)`
//! and, with `sigma_n^2 = log(1 - p/n) - sum_j (n_j/n)^2 log(1 - p/n_j)`, its
//! standard deviation is `sqrt(2) n sigma_n`. The test rejects for small
//! values of the statistic.

use serde::{Deserialize, Serialize};

use crate::block::LogDetRoute;
use crate::error::{Error, Result};
use crate::linalg::{
    compensated_sum, log_det_cholesky, log_det_incremental, scatter_matrix, DataMatrix,
};
use crate::report::{check_alpha, TestReport};

/// Independent samples sharing the dimension `p`, one matrix per group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSample {
    groups: Vec<DataMatrix>,
}

impl GroupedSample {
    pub fn new(groups: Vec<DataMatrix>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::InvalidDesign(format!(
                "at least two groups are required, got {}",
                groups.len()
            )));
        }
        let p = groups[0].p();
        for g in &groups {
            if g.p() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    actual: g.p(),
                });
            }
            if g.n() <= p {
                return Err(Error::DimensionExceedsSample { n: g.n(), p });
            }
        }
        Ok(Self { groups })
    }

    /// Splits the rows of `data` into consecutive groups of the given sizes.
    pub fn split(data: &DataMatrix, sizes: &[usize]) -> Result<Self> {
        let total: usize = sizes.iter().sum();
        if total != data.n() {
            return Err(Error::ShapeMismatch {
                expected: data.n(),
                actual: total,
            });
        }
        let mut start = 0;
        let mut groups = Vec::with_capacity(sizes.len());
        for &s in sizes {
            groups.push(data.row_range(start, start + s)?);
            start += s;
        }
        Self::new(groups)
    }

    pub fn groups(&self) -> &[DataMatrix] {
        &self.groups
    }

    pub fn q(&self) -> usize {
        self.groups.len()
    }

    pub fn p(&self) -> usize {
        self.groups[0].p()
    }

    /// Total sample size.
    pub fn n(&self) -> usize {
        self.groups.iter().map(DataMatrix::n).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(DataMatrix::n).collect()
    }

    /// All groups stacked in order.
    pub fn pooled(&self) -> DataMatrix {
        let p = self.p();
        let values: Vec<f64> = self
            .groups
            .iter()
            .flat_map(|g| g.as_slice().iter().copied())
            .collect();
        DataMatrix::from_row_major(self.n(), p, values).expect("groups validated")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqCovConstants {
    pub mu_n: f64,
    pub sigma_n: f64,
}

/// `log Lambda` (not doubled) evaluated via Cholesky factors.
pub fn log_lambda2(sample: &GroupedSample) -> Result<f64> {
    log_lambda2_with(sample, LogDetRoute::Cholesky)
}

pub fn log_lambda2_with(sample: &GroupedSample, route: LogDetRoute) -> Result<f64> {
    let p = sample.p() as f64;
    let n = sample.n() as f64;
    // log|A_j| for each group and log|A| for the pooled scatter
    let (group_logs, pooled_log) = match route {
        LogDetRoute::Cholesky => {
            let scatters: Vec<_> = sample.groups.iter().map(scatter_matrix).collect();
            let mut logs = Vec::with_capacity(scatters.len());
            for a in &scatters {
                logs.push(log_det_cholesky(a)?);
            }
            (logs, log_det_cholesky(&compensated_sum(&scatters))?)
        }
        LogDetRoute::Projection => {
            let cols = 0..sample.p();
            let mut logs = Vec::with_capacity(sample.q());
            for g in &sample.groups {
                logs.push(log_det_incremental(g, cols.clone())?);
            }
            (logs, log_det_incremental(&sample.pooled(), cols)?)
        }
    };
    let mut twice = -n * (pooled_log - p * n.ln());
    for (g, log_a) in sample.groups.iter().zip(group_logs) {
        let nj = g.n() as f64;
        twice += nj * (log_a - p * nj.ln());
    }
    Ok(0.5 * twice)
}

pub fn eqcov_constants(n_sizes: &[usize], p: usize) -> Result<EqCovConstants> {
    if n_sizes.len() < 2 {
        return Err(Error::InvalidDesign(format!(
            "at least two groups are required, got {}",
            n_sizes.len()
        )));
    }
    if p == 0 {
        return Err(Error::InvalidDesign("dimension must be positive".into()));
    }
    if let Some(&nj) = n_sizes.iter().find(|&&nj| nj <= p) {
        return Err(Error::InvalidDesign(format!(
            "every group needs more than p = {p} observations, got {nj}"
        )));
    }
    let n: usize = n_sizes.iter().sum();
    let (nf, pf) = (n as f64, p as f64);
    let mut mu = nf * (nf - pf - 0.5) * (-pf / nf).ln_1p();
    let mut var = (-pf / nf).ln_1p();
    for &nj in n_sizes {
        let m = nj as f64;
        let l = (-pf / m).ln_1p();
        mu -= m * (m - pf - 0.5) * l;
        var -= (m / nf) * (m / nf) * l;
    }
    if !(var > 0.0) {
        return Err(Error::InvalidDesign(format!(
            "null variance {var} is not positive"
        )));
    }
    Ok(EqCovConstants {
        mu_n: mu,
        sigma_n: var.sqrt(),
    })
}

/// One-sided test of `H0: Sigma_1 = ... = Sigma_q`.
///
/// The report carries `2 log Lambda` as its statistic, `mu_n` as centering
/// and `sqrt(2) n sigma_n` as scale.
pub fn eqcov_test(sample: &GroupedSample, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let sizes = sample.sizes();
    let c = eqcov_constants(&sizes, sample.p())?;
    let stat = 2.0 * log_lambda2(sample)?;
    let scale = std::f64::consts::SQRT_2 * sample.n() as f64 * c.sigma_n;
    let mut warnings = Vec::new();
    let worst = sizes
        .iter()
        .map(|&nj| sample.p() as f64 / nj as f64)
        .fold(0.0, f64::max);
    if worst > crate::block::WARN_RATIO {
        warnings.push(format!(
            "max p/n_j = {worst:.4} exceeds {}: a group is barely larger than p",
            crate::block::WARN_RATIO
        ));
    }
    Ok(TestReport::new(stat, c.mu_n, scale, alpha)?.with_warnings(warnings))
}
