//! Likelihood ratio tests for covariance structure when the dimension grows
//! with the sample size: block-diagonal independence, complete independence
//! via the correlation determinant, and equality of several covariance
//! matrices. Includes a reproducible Monte Carlo engine for size and power.
//!
//! With the `parallel` feature (on by default) replications run on the rayon
//! thread pool; without it they run in order on the calling thread. Results
//! are identical either way.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod block;
pub mod eqcov;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod normal;
pub mod output;
pub mod report;
pub mod sampling;

#[doc(hidden)]
pub mod oracle;

pub use block::{
    block_constants, block_test, block_test_with, correlation_constants, correlation_test,
    log_det_correlation, log_vn, log_vn_with, BlockTestConstants, LogDetRoute,
};
pub use eqcov::{eqcov_constants, eqcov_test, log_lambda2, EqCovConstants, GroupedSample};
pub use error::{Error, Result};
pub use linalg::{BlockPartition, DataMatrix, SymmetricMatrix};
pub use montecarlo::{
    default_deltas, ks_statistic, power_curve, run, run_histogram, run_level, Design, Histogram,
    Scenario, SimulationPlan, SimulationResult, TestKind,
};
pub use report::TestReport;
pub use sampling::{DistributionSpec, Seed};

/// `f(0), ..., f(len - 1)` in index order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}

/// Runs `f` with replications spread over `threads` workers.
#[cfg(feature = "parallel")]
pub fn with_threads<R, F>(threads: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidPlan(format!("cannot start {threads} threads: {e}")))?;
    Ok(pool.install(f))
}

/// Sequential build: the thread count is ignored.
#[cfg(not(feature = "parallel"))]
pub fn with_threads<R, F>(_threads: usize, f: F) -> Result<R>
where
    F: FnOnce() -> R,
{
    Ok(f())
}
