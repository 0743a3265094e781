use serde::{Deserialize, Serialize};

use super::symbolic_member;
use crate::error::{invalid, Result};
use crate::exec::map_indexed;
use crate::family::ModelFamily;
use crate::likelihood::forward_log_likelihood;
use crate::observation::ObservationModel;
use crate::rng::{child_seed, rng_from_seed};
use crate::simulate::simulate_with;
use crate::stats::mean_and_se;
use crate::systems::{HiddenSystem, MarkovSystem, ParameterPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Mean of `(1/n)(log p_theta0(y) - log p_theta(y))` under `theta0`.
    pub kl_rate_estimate: f64,
    pub kl_std_error: f64,
    /// Threshold defining `A_n = {y : normalized log-ratio >= threshold}`.
    pub threshold: f64,
    /// Empirical `P_theta0(A_n)`.
    pub p_theta0_an: f64,
    /// Empirical `(1/n) log P_theta(A_n)`; `-inf` when no simulation hit `A_n`.
    pub log_p_theta_an_rate: f64,
    /// `(1/n) log` of the 3-sigma Wilson upper bound on `P_theta(A_n)`.
    pub log_p_theta_an_upper: f64,
    pub hits_theta: usize,
    pub n_used: usize,
    pub reps: usize,
    /// `|kl_rate_estimate| < 3 * kl_std_error`: the two parameters look
    /// equivalent and the separation is inconclusive.
    pub inconclusive: bool,
}

/// Wilson score upper bound for a binomial proportion at `z` sigmas.
pub fn wilson_upper(hits: usize, trials: usize, z: f64) -> f64 {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre + spread) / (1.0 + z2 / n)).min(1.0)
}

struct Pair {
    m0: MarkovSystem,
    g0: ObservationModel,
    m1: MarkovSystem,
    g1: ObservationModel,
}

impl Pair {
    fn log_ratio(&self, y: &[f64], n: usize) -> Result<f64> {
        let l0 = forward_log_likelihood(&self.m0, &self.g0, y)?.loglik;
        let l1 = forward_log_likelihood(&self.m1, &self.g1, y)?.loglik;
        Ok(if l0 == l1 { 0.0 } else { (l0 - l1) / n as f64 })
    }

    fn draw(&self, under_theta0: bool, n: usize, seed: u64) -> Vec<f64> {
        let (m, g) = if under_theta0 { (&self.m0, &self.g0) } else { (&self.m1, &self.g1) };
        simulate_with(&HiddenSystem::Markov(m.clone()), g, n, &mut rng_from_seed(seed)).1
    }
}

/// Witness sets for exponential identifiability. The KL rate `r` is
/// estimated under `theta0`, then `A_n` is the set where the normalized
/// log-likelihood ratio is at least `r / 2`; its probability is estimated
/// by fresh simulations under `theta0` and under `theta`.
pub fn identifiability_separation(
    family: &dyn ModelFamily,
    theta0: &ParameterPoint,
    theta: &ParameterPoint,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<SeparationReport> {
    if n == 0 || reps == 0 {
        return Err(invalid("identifiability needs n >= 1 and reps >= 1"));
    }
    let (m0, g0) = symbolic_member(family, theta0)?;
    let (m1, g1) = symbolic_member(family, theta)?;
    let pair = Pair { m0, g0, m1, g1 };

    let ratios = |under_theta0: bool, stream: u64| -> Result<Vec<f64>> {
        map_indexed(reps, |r| {
            let y = pair.draw(under_theta0, n, child_seed(child_seed(seed, stream), r as u64));
            pair.log_ratio(&y, n)
        })
        .into_iter()
        .collect()
    };
    let estimate = ratios(true, 0)?;
    let (kl, kl_se) = mean_and_se(&estimate);
    let threshold = kl / 2.0;

    let under_theta0 = ratios(true, 1)?;
    let p_theta0_an = under_theta0.iter().filter(|&&r| r >= threshold).count() as f64 / reps as f64;
    let under_theta = ratios(false, 2)?;
    let hits_theta = under_theta.iter().filter(|&&r| r >= threshold).count();
    let log_rate = (hits_theta as f64 / reps as f64).ln() / n as f64;
    let upper = wilson_upper(hits_theta, reps, 3.0).ln() / n as f64;

    Ok(SeparationReport {
        kl_rate_estimate: kl,
        kl_std_error: kl_se,
        threshold,
        p_theta0_an,
        log_p_theta_an_rate: log_rate,
        log_p_theta_an_upper: upper,
        hits_theta,
        n_used: n,
        reps,
        inconclusive: !(kl.abs() >= 3.0 * kl_se) || kl <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{ConfiguredFamily, HiddenSpec, ObservationSpec};
    use crate::systems::ParameterBox;

    fn bernoulli_identity() -> ConfiguredFamily {
        ConfiguredFamily::new(
            HiddenSpec::Bernoulli,
            ObservationSpec::Channel {
                matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            },
            ParameterBox::interval(0.01, 0.99).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn same_parameter_is_inconclusive() {
        let fam = bernoulli_identity();
        let t = ParameterPoint::scalar(0.3);
        let r = identifiability_separation(&fam, &t, &t, 200, 50, 1).unwrap();
        assert_eq!(r.kl_rate_estimate, 0.0);
        assert!(r.inconclusive);
    }

    #[test]
    fn bernoulli_pair_separates() {
        let fam = bernoulli_identity();
        let r = identifiability_separation(&fam, &ParameterPoint::scalar(0.3), &ParameterPoint::scalar(0.7), 500, 200, 2)
            .unwrap();
        let kl = 0.3 * (3.0f64 / 7.0).ln() + 0.7 * (7.0f64 / 3.0).ln();
        assert!((r.kl_rate_estimate - kl).abs() < 3.0 * r.kl_std_error + 0.002);
        assert!(!r.inconclusive);
        assert!(r.p_theta0_an > 0.9);
        assert!(r.log_p_theta_an_upper < 0.0);
    }

    #[test]
    fn wilson_bounds() {
        assert!((wilson_upper(0, 100, 3.0) - 9.0 / 109.0).abs() < 1e-15);
        assert_eq!(wilson_upper(10, 10, 3.0), 1.0);
        assert!(wilson_upper(5, 10, 3.0) > 0.5);
    }
}
