//! Monte Carlo estimation of size, power and null distributions.
//!
//! Replication `r` draws its data from stream `r` of the plan's seed, so a
//! run is a pure function of the plan regardless of how replications are
//! scheduled across threads.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::block::{block_constants, correlation_constants, log_det_correlation, log_vn};
use crate::eqcov::{eqcov_constants, log_lambda2, GroupedSample};
use crate::error::{Error, Result};
use crate::linalg::{BlockPartition, DataMatrix};
use crate::normal::{normal_cdf, normal_quantile};
use crate::report::check_alpha;
use crate::sampling::{apply_compound_root, sample_entry_matrix, DistributionSpec, Seed};

/// Block layouts used in the simulation study.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scenario {
    /// Three blocks of `p/3` variables.
    ThreeEqual,
    /// `p/2 - 1` single variables followed by one block of `p/2 + 1`.
    SinglesPlusOne,
    Custom(BlockPartition),
}

impl Scenario {
    pub fn partition(&self, p: usize) -> Result<BlockPartition> {
        match self {
            Scenario::ThreeEqual => {
                if p == 0 || !p.is_multiple_of(3) {
                    return Err(Error::InvalidPartition(format!(
                        "three equal blocks need p divisible by 3, got {p}"
                    )));
                }
                BlockPartition::uniform(3, p / 3)
            }
            Scenario::SinglesPlusOne => {
                if p < 4 || !p.is_multiple_of(2) {
                    return Err(Error::InvalidPartition(format!(
                        "singles-plus-one layout needs an even p >= 4, got {p}"
                    )));
                }
                let q = p / 2;
                let mut sizes = vec![1; q - 1];
                sizes.push(q + 1);
                BlockPartition::new(sizes)
            }
            Scenario::Custom(part) => {
                if part.p() != p {
                    return Err(Error::DimensionMismatch {
                        expected: p,
                        actual: part.p(),
                    });
                }
                Ok(part.clone())
            }
        }
    }
}

/// Which statistic a plan simulates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "snake_case")]
pub enum Design {
    Block {
        partition: BlockPartition,
    },
    Correlation,
    /// Group sizes; the total is the plan's `n`.
    EqCov {
        groups: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Block,
    Correlation,
    EqCov,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::Block => "block",
            TestKind::Correlation => "corr",
            TestKind::EqCov => "eqcov",
        })
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block" => Ok(TestKind::Block),
            "corr" | "correlation" => Ok(TestKind::Correlation),
            "eqcov" => Ok(TestKind::EqCov),
            _ => Err(Error::InvalidPlan(format!("unknown test `{s}`"))),
        }
    }
}

impl Design {
    pub fn kind(&self) -> TestKind {
        match self {
            Design::Block { .. } => TestKind::Block,
            Design::Correlation => TestKind::Correlation,
            Design::EqCov { .. } => TestKind::EqCov,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub design: Design,
    pub n: usize,
    pub p: usize,
    pub dist: DistributionSpec,
    pub reps: usize,
    pub seed: Seed,
    pub alpha: f64,
}

/// Null centering, scale and critical value of the simulated statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
struct NullLaw {
    mu: f64,
    sigma: f64,
    critical: f64,
}

impl SimulationPlan {
    pub fn block(n: usize, partition: BlockPartition) -> Self {
        Self {
            n,
            p: partition.p(),
            design: Design::Block { partition },
            dist: DistributionSpec::StandardNormal,
            reps: 1000,
            seed: 0,
            alpha: 0.05,
        }
    }

    pub fn correlation(n: usize, p: usize) -> Self {
        Self {
            design: Design::Correlation,
            ..Self::block(n, BlockPartition::unit(p).expect("p > 0"))
        }
    }

    pub fn eqcov(groups: Vec<usize>, p: usize) -> Self {
        Self {
            n: groups.iter().sum(),
            p,
            design: Design::EqCov { groups },
            dist: DistributionSpec::StandardNormal,
            reps: 1000,
            seed: 0,
            alpha: 0.05,
        }
    }

    pub fn with_dist(mut self, dist: DistributionSpec) -> Self {
        self.dist = dist;
        self
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_seed(mut self, seed: Seed) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.null_law().map(|_| ())
    }

    fn null_law(&self) -> Result<NullLaw> {
        if self.reps == 0 {
            return Err(Error::InvalidPlan("reps must be positive".into()));
        }
        check_alpha(self.alpha)?;
        self.dist.validate()?;
        let (mu, sigma) = match &self.design {
            Design::Block { partition } => {
                if partition.p() != self.p {
                    return Err(Error::DimensionMismatch {
                        expected: self.p,
                        actual: partition.p(),
                    });
                }
                let c = block_constants(self.n, partition)?;
                (c.mu_n, c.sigma_n)
            }
            Design::Correlation => {
                let c = correlation_constants(self.n, self.p)?;
                (c.mu_n, c.sigma_n)
            }
            Design::EqCov { groups } => {
                if groups.iter().sum::<usize>() != self.n {
                    return Err(Error::InvalidPlan(format!(
                        "group sizes sum to {}, not n = {}",
                        groups.iter().sum::<usize>(),
                        self.n
                    )));
                }
                let c = eqcov_constants(groups, self.p)?;
                (c.mu_n, std::f64::consts::SQRT_2 * self.n as f64 * c.sigma_n)
            }
        };
        Ok(NullLaw {
            mu,
            sigma,
            critical: sigma * normal_quantile(self.alpha)? + mu,
        })
    }

    /// Data of replication `r` under compound-symmetry strength `delta`.
    ///
    /// For the equal-covariance test only the first group is transformed,
    /// which makes `delta > 0` an alternative.
    pub fn replication_data(&self, delta: f64, r: usize) -> Result<DataMatrix> {
        let x = sample_entry_matrix(self.n, self.p, self.dist, self.seed, r as u64)?;
        if delta == 0.0 {
            return Ok(x);
        }
        match &self.design {
            Design::EqCov { groups } => {
                let first = x.row_range(0, groups[0])?;
                let rest = x.row_range(groups[0], self.n)?;
                let moved = apply_compound_root(&first, delta);
                let values = moved
                    .as_slice()
                    .iter()
                    .chain(rest.as_slice())
                    .copied()
                    .collect();
                DataMatrix::from_row_major(self.n, self.p, values)
            }
            _ => Ok(apply_compound_root(&x, delta)),
        }
    }

    /// Unstandardized statistic on one data set.
    fn statistic(&self, data: &DataMatrix) -> Result<f64> {
        match &self.design {
            Design::Block { partition } => log_vn(data, partition),
            Design::Correlation => log_det_correlation(data),
            Design::EqCov { groups } => {
                Ok(2.0 * log_lambda2(&GroupedSample::split(data, groups)?)?)
            }
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::InvalidPlan(format!(
            "delta must lie in [0, 1), got {delta}"
        )))
    }
}

/// Rejection count and standardized statistics at one value of `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub delta: f64,
    pub reps: usize,
    pub rejections: usize,
    pub rejection_rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / reps)`.
    pub standard_error: f64,
    /// Standardized statistic of each replication, in replication order.
    pub z: Vec<f64>,
}

/// Runs every replication of `plan` at compound-symmetry strength `delta`.
pub fn run(plan: &SimulationPlan, delta: f64) -> Result<SimulationResult> {
    check_delta(delta)?;
    let law = plan.null_law()?;
    let outcomes: Vec<Result<(f64, bool)>> = crate::par_map(plan.reps, |r| {
        let stat = plan.statistic(&plan.replication_data(delta, r)?)?;
        Ok(((stat - law.mu) / law.sigma, stat <= law.critical))
    });
    let mut z = Vec::with_capacity(plan.reps);
    let mut rejections = 0;
    for o in outcomes {
        let (zr, reject) = o?;
        z.push(zr);
        rejections += usize::from(reject);
    }
    let rate = rejections as f64 / plan.reps as f64;
    Ok(SimulationResult {
        delta,
        reps: plan.reps,
        rejections,
        rejection_rate: rate,
        standard_error: (rate * (1.0 - rate) / plan.reps as f64).sqrt(),
        z,
    })
}

/// Empirical size under the null hypothesis.
pub fn run_level(plan: &SimulationPlan) -> Result<SimulationResult> {
    run(plan, 0.0)
}

/// `delta = 0, 0.01, ..., 0.12`.
pub fn default_deltas() -> Vec<f64> {
    (0..=12).map(|i| i as f64 / 100.0).collect()
}

/// One [`run`] per `delta`, all sharing the plan's replication streams.
pub fn power_curve(plan: &SimulationPlan, deltas: &[f64]) -> Result<Vec<SimulationResult>> {
    if deltas.is_empty() {
        return Err(Error::InvalidPlan("empty delta grid".into()));
    }
    deltas.iter().map(|&d| run(plan, d)).collect()
}

/// Fixed-width histogram with explicit tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lower: f64,
    pub upper: f64,
    pub counts: Vec<usize>,
    pub below: usize,
    pub above: usize,
}

impl Histogram {
    pub const DEFAULT_BINS: usize = 40;

    pub fn new(values: &[f64], bins: usize, lower: f64, upper: f64) -> Result<Self> {
        if bins == 0 || !(lower < upper) {
            return Err(Error::InvalidPlan(format!(
                "bad histogram layout: {bins} bins on [{lower}, {upper})"
            )));
        }
        let width = (upper - lower) / bins as f64;
        let mut h = Self {
            lower,
            upper,
            counts: vec![0; bins],
            below: 0,
            above: 0,
        };
        for &v in values {
            if v < lower {
                h.below += 1;
            } else if v >= upper {
                h.above += 1;
            } else {
                let i = (((v - lower) / width) as usize).min(bins - 1);
                h.counts[i] += 1;
            }
        }
        Ok(h)
    }

    pub fn edges(&self) -> Vec<f64> {
        let bins = self.counts.len();
        let width = (self.upper - self.lower) / bins as f64;
        (0..=bins).map(|i| self.lower + i as f64 * width).collect()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.below + self.above
    }
}

/// Standardized statistics under `H0` binned on `[-4, 4)`.
pub fn run_histogram(plan: &SimulationPlan, bins: usize) -> Result<(SimulationResult, Histogram)> {
    let res = run_level(plan)?;
    let h = Histogram::new(&res.z, bins, -4.0, 4.0)?;
    Ok((res, h))
}

/// Kolmogorov-Smirnov distance between the sample and `N(0, 1)`.
pub fn ks_statistic(sample: &[f64]) -> f64 {
    if sample.is_empty() {
        return f64::NAN;
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (f - i as f64 / m).max((i + 1) as f64 / m - f)
        })
        .fold(0.0, f64::max)
}
