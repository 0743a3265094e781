//! Marginal likelihood `p_theta(y_0^n)`: exact forward recursion, a
//! brute-force path-sum oracle, a Monte Carlo estimator over the invariant
//! measure, and the entropy-rate estimator. All values are natural logs.

mod brute;
mod entropy;
mod forward;
mod monte_carlo;

pub use brute::{brute_force_log_likelihood, BRUTE_FORCE_LIMIT};
pub use entropy::{entropy_rate_estimate, EntropyRateEstimate};
pub use forward::forward_log_likelihood;
pub use monte_carlo::{mc_log_likelihood, McOptions, DEFAULT_MC_SAMPLES};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::observation::ObservationModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LikelihoodMethod {
    Forward,
    MonteCarlo,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLikelihoodResult {
    /// `log p_theta(y_0^n)`; `-inf` when every path has zero weight.
    pub loglik: f64,
    pub method: LikelihoodMethod,
    /// Jackknife standard error, Monte Carlo only.
    pub mc_std_error: Option<f64>,
    /// Jackknife estimate of the downward bias, Monte Carlo only.
    pub mc_bias: Option<f64>,
    /// Effective sample size of the importance weights, Monte Carlo only.
    pub effective_sample_size: Option<f64>,
    pub zero_likelihood: bool,
}

impl LogLikelihoodResult {
    pub(crate) fn exact(loglik: f64, method: LikelihoodMethod) -> Self {
        Self {
            loglik,
            method,
            mc_std_error: None,
            mc_bias: None,
            effective_sample_size: None,
            zero_likelihood: loglik == f64::NEG_INFINITY,
        }
    }

    /// `loglik / max(n, 1)`.
    pub fn normalized(&self, n: usize) -> f64 {
        self.loglik / n.max(1) as f64
    }
}

pub(crate) fn check_inputs(size: usize, model: &ObservationModel, y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(invalid("observation sequence is empty"));
    }
    if model.alphabet_size() != size {
        return Err(invalid(format!(
            "observation model covers {} symbols, hidden system has {size}",
            model.alphabet_size()
        )));
    }
    Ok(())
}
