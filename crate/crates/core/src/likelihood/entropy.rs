use serde::{Deserialize, Serialize};

use super::forward_log_likelihood;
use crate::error::{invalid, Result};
use crate::exec::map_indexed;
use crate::observation::ObservationModel;
use crate::rng::{child_seed, rng_from_seed};
use crate::simulate::simulate_with;
use crate::systems::{HiddenSystem, MarkovSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRateEstimate {
    /// Mean of the per-replicate values.
    pub h_hat: f64,
    /// `(1/n) log p(y_0^n)` on each replicate.
    pub per_rep: Vec<f64>,
    pub std_error: f64,
}

/// Estimate `lim (1/n) log p_theta0(Y_0^n)` by averaging the normalized
/// forward log-likelihood over `reps` fresh simulations from the system.
pub fn entropy_rate_estimate(
    system: &MarkovSystem,
    model: &ObservationModel,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<EntropyRateEstimate> {
    if n == 0 || reps == 0 {
        return Err(invalid("entropy rate needs n >= 1 and reps >= 1"));
    }
    let hidden = HiddenSystem::Markov(system.clone());
    let per_rep = map_indexed(reps, |r| {
        let mut rng = rng_from_seed(child_seed(seed, r as u64));
        let (_, y) = simulate_with(&hidden, model, n, &mut rng);
        forward_log_likelihood(system, model, &y).map(|l| l.normalized(n))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let (h_hat, std_error) = crate::stats::mean_and_se(&per_rep);
    Ok(EntropyRateEstimate {
        h_hat,
        per_rep,
        std_error,
    })
}
