//! Reproducible generation of observation matrices.
//!
//! Every matrix is keyed by a `(seed, stream)` pair: the seed selects a
//! ChaCha8 key and the stream selects one of its 2^64 independent streams,
//! so replication `r` of an experiment can be generated on any thread
//! without touching shared RNG state.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DataMatrix, SymmetricMatrix};

pub type Seed = u64;

/// Law of the i.i.d. entries of `x`. Every variant has mean 0 and variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    StandardNormal,
    /// Student t with `df` degrees of freedom divided by `sqrt(df / (df - 2))`.
    StandardizedT {
        df: u32,
    },
    /// `rate * (E - 1/rate)` for `E ~ Exp(rate)`, i.e. `Exp(1) - 1` in law.
    CenteredExponential {
        rate: f64,
    },
}

impl DistributionSpec {
    pub const T15: Self = Self::StandardizedT { df: 15 };
    pub const EXP1: Self = Self::CenteredExponential { rate: 1.0 };

    /// The three laws used throughout the simulation study.
    pub const ALL: [Self; 3] = [Self::StandardNormal, Self::T15, Self::EXP1];

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::StandardNormal => Ok(()),
            // df >= 5 keeps a finite (4 + delta)-th moment.
            Self::StandardizedT { df } if df < 5 => Err(Error::InvalidDistribution(format!(
                "standardized t needs at least 5 degrees of freedom, got {df}"
            ))),
            Self::StandardizedT { .. } => Ok(()),
            Self::CenteredExponential { rate } if !(rate > 0.0 && rate.is_finite()) => Err(
                Error::InvalidDistribution(format!("exponential rate {rate} must be positive")),
            ),
            Self::CenteredExponential { .. } => Ok(()),
        }
    }

    /// Fourth moment `E[x^4]` of the standardized law.
    pub fn fourth_moment(&self) -> f64 {
        match *self {
            Self::StandardNormal => 3.0,
            Self::StandardizedT { df } => {
                let v = df as f64;
                3.0 * (v - 2.0) / (v - 4.0)
            }
            Self::CenteredExponential { .. } => 9.0,
        }
    }

    fn sampler(&self) -> Result<EntrySampler> {
        self.validate()?;
        Ok(match *self {
            Self::StandardNormal => EntrySampler::Normal,
            Self::StandardizedT { df } => {
                let v = df as f64;
                EntrySampler::T {
                    chi2: ChiSquared::new(v).expect("df validated"),
                    df: v,
                    scale: ((v - 2.0) / v).sqrt(),
                }
            }
            Self::CenteredExponential { .. } => EntrySampler::Exp,
        })
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::StandardNormal => f.write_str("normal"),
            Self::StandardizedT { df } => write!(f, "t{df}"),
            Self::CenteredExponential { rate } if *rate == 1.0 => f.write_str("exp"),
            Self::CenteredExponential { rate } => write!(f, "exp{rate}"),
        }
    }
}

/// Accepts `normal`, `t<df>` (e.g. `t15`) and `exp` / `exp<rate>`.
impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidDistribution(format!("unknown distribution `{s}`"));
        let spec = match s.as_str() {
            "normal" | "gauss" | "gaussian" => Self::StandardNormal,
            "exp" | "exponential" => Self::EXP1,
            _ => {
                if let Some(df) = s.strip_prefix('t') {
                    Self::StandardizedT {
                        df: df.parse().map_err(|_| bad())?,
                    }
                } else if let Some(rate) = s.strip_prefix("exp") {
                    Self::CenteredExponential {
                        rate: rate.parse().map_err(|_| bad())?,
                    }
                } else {
                    return Err(bad());
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

enum EntrySampler {
    Normal,
    T {
        chi2: ChiSquared<f64>,
        df: f64,
        scale: f64,
    },
    Exp,
}

impl EntrySampler {
    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Self::Normal => StandardNormal.sample(rng),
            Self::T { chi2, df, scale } => {
                let z: f64 = StandardNormal.sample(rng);
                let w = chi2.sample(rng);
                z / (w / df).sqrt() * scale
            }
            Self::Exp => {
                // inverse CDF; 1 - U lies in (0, 1]
                let u: f64 = rng.random();
                -(1.0 - u).ln() - 1.0
            }
        }
    }
}

/// RNG for stream `stream` under `seed`.
pub fn stream_rng(seed: Seed, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n x p` matrix of i.i.d. standardized draws, filled row by row.
pub fn sample_entry_matrix(
    n: usize,
    p: usize,
    dist: DistributionSpec,
    seed: Seed,
    stream: u64,
) -> Result<DataMatrix> {
    let sampler = dist.sampler()?;
    let mut rng = stream_rng(seed, stream);
    let values = (0..n * p).map(|_| sampler.draw(&mut rng)).collect();
    DataMatrix::from_row_major(n, p, values)
}

/// Maps each observation `x_k` to `root * x_k`.
pub fn apply_root(data: &DataMatrix, root: &SymmetricMatrix) -> Result<DataMatrix> {
    let p = data.p();
    if root.dim() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            actual: root.dim(),
        });
    }
    Ok(data.map_rows(|x, y| {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = root.row(i).iter().zip(x).map(|(r, v)| r * v).sum();
        }
    }))
}

/// `apply_root` specialized to the compound-symmetry root `a I + b 11^T`:
/// `y = a x + b (sum x) 1`, O(p) per observation.
pub(crate) fn apply_compound_root(data: &DataMatrix, delta: f64) -> DataMatrix {
    let (a, b) = crate::linalg::compound_symmetry_root_coefficients(delta, data.p());
    data.map_rows(|x, y| {
        let shift = b * x.iter().sum::<f64>();
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = a * xi + shift;
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{compound_symmetry_sqrt, sample_covariance};

    fn moments(xs: &[f64]) -> (f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        (mean, m2, m3 / m2.powf(1.5))
    }

    #[test]
    fn same_key_same_matrix() {
        for dist in DistributionSpec::ALL {
            let a = sample_entry_matrix(7, 5, dist, 42, 3).unwrap();
            let b = sample_entry_matrix(7, 5, dist, 42, 3).unwrap();
            assert_eq!(a, b);
            let c = sample_entry_matrix(7, 5, dist, 42, 4).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn standardized_t_has_unit_variance() {
        let n = 1_000_000;
        let x = sample_entry_matrix(n, 1, DistributionSpec::T15, 11, 0).unwrap();
        let (mean, var, _) = moments(x.as_slice());
        // kurtosis of t_15 is 3 * 13 / 11 regardless of scaling
        let nu4 = 39.0 / 11.0;
        assert!((DistributionSpec::T15.fourth_moment() - nu4).abs() < 1e-15);
        let se_var = ((nu4 - 1.0) / n as f64).sqrt();
        assert!((var - 1.0).abs() <= 1.01 * 3.0 * se_var, "var = {var}");
        assert!(mean.abs() <= 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn centered_exponential_moments() {
        let n = 1_000_000;
        let x = sample_entry_matrix(n, 1, DistributionSpec::EXP1, 12, 0).unwrap();
        let (mean, var, skew) = moments(x.as_slice());
        assert!(mean.abs() <= 3e-3, "mean = {mean}");
        // Var(sample variance) = (m4 - 1) / n with m4 = 9
        assert!((var - 1.0).abs() <= 4.0 * (8.0 / n as f64).sqrt());
        assert!((skew - 2.0).abs() < 0.05, "skew = {skew}");
    }

    #[test]
    fn normal_moments() {
        let n = 1_000_000;
        let x = sample_entry_matrix(n, 1, DistributionSpec::StandardNormal, 13, 0).unwrap();
        let (mean, var, _) = moments(x.as_slice());
        assert!(mean.abs() <= 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() <= 4.0 * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn streams_are_uncorrelated() {
        let (n, p) = (200, 50);
        for dist in DistributionSpec::ALL {
            let a = sample_entry_matrix(n, p, dist, 5, 1).unwrap();
            let b = sample_entry_matrix(n, p, dist, 5, 2).unwrap();
            let (ma, _, _) = moments(a.as_slice());
            let (mb, _, _) = moments(b.as_slice());
            let mut sab = 0.0;
            let mut saa = 0.0;
            let mut sbb = 0.0;
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                sab += (x - ma) * (y - mb);
                saa += (x - ma).powi(2);
                sbb += (y - mb).powi(2);
            }
            let r = sab / (saa * sbb).sqrt();
            assert!(r.abs() <= 4.0 / ((n * p) as f64).sqrt(), "{dist}: r = {r}");
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(
            "normal".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::StandardNormal
        );
        assert_eq!(
            "t15".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::T15
        );
        assert_eq!(
            "exp".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::EXP1
        );
        assert!("t3".parse::<DistributionSpec>().is_err());
        assert!("cauchy".parse::<DistributionSpec>().is_err());
        for d in DistributionSpec::ALL {
            assert_eq!(d.to_string().parse::<DistributionSpec>().unwrap(), d);
        }
    }

    #[test]
    fn identity_root_is_exact() {
        let x = sample_entry_matrix(6, 4, DistributionSpec::EXP1, 1, 0).unwrap();
        assert_eq!(apply_root(&x, &SymmetricMatrix::identity(4)).unwrap(), x);
        assert_eq!(apply_compound_root(&x, 0.0), x);
    }

    #[test]
    fn diagonal_root_scales_columns() {
        let x = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![-3.0, 0.5]]).unwrap();
        let y = apply_root(&x, &SymmetricMatrix::diagonal(&[2.0, 3.0])).unwrap();
        assert_eq!(y.as_slice(), &[2.0, 6.0, -6.0, 1.5]);
        assert!(matches!(
            apply_root(&x, &SymmetricMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compound_root_fast_path_matches_dense() {
        let x = sample_entry_matrix(10, 6, DistributionSpec::T15, 3, 0).unwrap();
        let dense = apply_root(&x, &compound_symmetry_sqrt(0.3, 6).unwrap()).unwrap();
        let fast = apply_compound_root(&x, 0.3);
        for (a, b) in dense.as_slice().iter().zip(fast.as_slice()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rooted_sample_covariance_approaches_target() {
        let (n, p, delta) = (200_000, 3, 0.4);
        let x = sample_entry_matrix(n, p, DistributionSpec::StandardNormal, 9, 0).unwrap();
        let y = apply_root(&x, &compound_symmetry_sqrt(delta, p).unwrap()).unwrap();
        let s = sample_covariance(&y);
        for i in 0..p {
            for j in 0..p {
                let target = if i == j { 1.0 } else { delta };
                // Var(y_i y_j) = s_ii s_jj + s_ij^2 for Gaussian data
                let se = ((1.0 + target * target) / n as f64).sqrt();
                assert!((s.get(i, j) - target).abs() <= 3.0 * se, "({i},{j})");
            }
        }
    }
}
