use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{normal_cdf, normal_quantile};

/// Outcome of a one-sided (lower tail) standardized likelihood ratio test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    /// `log V_n` for the block tests, `2 log Lambda` for equal covariances.
    pub log_statistic: f64,
    pub mu: f64,
    pub sigma: f64,
    pub z: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub assumption_warnings: Vec<String>,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

impl TestReport {
    /// Standardizes `log_statistic` and applies the rejection rule
    /// `log_statistic <= sigma * u_alpha + mu`.
    pub fn new(log_statistic: f64, mu: f64, sigma: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let z = (log_statistic - mu) / sigma;
        Ok(Self {
            log_statistic,
            mu,
            sigma,
            z,
            p_value: normal_cdf(z),
            alpha,
            reject: log_statistic <= Self::critical_value(mu, sigma, alpha)?,
            assumption_warnings: Vec::new(),
        })
    }

    /// Rejection threshold on the unstandardized statistic.
    pub fn critical_value(mu: f64, sigma: f64, alpha: f64) -> Result<f64> {
        Ok(sigma * normal_quantile(alpha)? + mu)
    }

    /// Re-derives the decision from the stored fields.
    pub fn recomputed_decision(&self) -> Result<bool> {
        Ok(self.log_statistic <= Self::critical_value(self.mu, self.sigma, self.alpha)?)
    }

    pub(crate) fn with_warnings(mut self, warnings: Vec<String>) -> Self {
        self.assumption_warnings = warnings;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn boundary_is_rejected() {
        let (mu, sigma, alpha) = (-3.0, 0.7, 0.05);
        let at = TestReport::critical_value(mu, sigma, alpha).unwrap();
        let r = TestReport::new(at, mu, sigma, alpha).unwrap();
        assert!(r.reject);
        assert!((r.z - normal_quantile(alpha).unwrap()).abs() < 1e-14);
        let above = TestReport::new(at + 1e-12, mu, sigma, alpha).unwrap();
        assert!(!above.reject);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(TestReport::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(TestReport::new(0.0, 0.0, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn decision_rules_agree(
            stat in -50.0f64..5.0,
            mu in -40.0f64..0.0,
            sigma in 0.05f64..10.0,
            alpha in 0.001f64..0.5,
        ) {
            let r = TestReport::new(stat, mu, sigma, alpha).unwrap();
            let u = normal_quantile(alpha).unwrap();
            prop_assert_eq!(r.reject, r.recomputed_decision().unwrap());
            // Away from the rounding band around the threshold, all three
            // formulations coincide.
            if (r.z - u).abs() > 1e-8 {
                prop_assert_eq!(r.reject, r.p_value <= alpha);
                prop_assert_eq!(r.reject, r.z <= u);
            }
        }
    }
}
