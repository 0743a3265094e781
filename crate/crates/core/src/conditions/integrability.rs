use serde::{Deserialize, Serialize};

use super::symbolic_member;
use crate::error::{invalid, Result};
use crate::family::ModelFamily;
use crate::rng::rng_from_seed;
use crate::stats::mean_and_se;
use crate::systems::ParameterPoint;

/// Monte Carlo mean with its standard error and a half-sample Cauchy flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    /// The two half-sample means differ by more than
    /// `max(1e-2, 3 * their combined standard error)`.
    pub blow_up: bool,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let (mean, std_error) = mean_and_se(xs);
        let half = xs.len() / 2;
        let (m1, s1) = mean_and_se(&xs[..half]);
        let (m2, s2) = mean_and_se(&xs[half..]);
        let gap = (m1 - m2).abs();
        let blow_up = !mean.is_finite() || gap > 1e-2_f64.max(3.0 * (s1 * s1 + s2 * s2).sqrt());
        Self { mean, std_error, blow_up }
    }

    pub fn is_finite(&self) -> bool {
        self.mean.is_finite() && !self.blow_up
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    /// `E[log+ gamma_theta0(Y_0)]`.
    pub log_plus_gamma_theta0: Estimate,
    /// `E|log int g_theta0(Y_0 | x) d mu(x)|`.
    pub abs_log_marginal: Estimate,
    /// `E[sup_{theta in U} log+ gamma_theta(Y_0)]`.
    pub sup_log_plus_gamma: Estimate,
    pub reps: usize,
}

/// Monte Carlo estimates of the logarithmic integrability expectations
/// under `theta0`, with `Y_0` drawn from the stationary observation law.
pub fn integrability_check(
    family: &dyn ModelFamily,
    theta0: &ParameterPoint,
    neighbourhood: &[ParameterPoint],
    reps: usize,
    seed: u64,
) -> Result<IntegrabilityReport> {
    if reps < 100 {
        return Err(invalid("integrability check needs reps >= 100"));
    }
    let (system, model) = symbolic_member(family, theta0)?;
    let others = neighbourhood
        .iter()
        .map(|t| family.observation(t))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = rng_from_seed(seed);
    let mut a = Vec::with_capacity(reps);
    let mut b = Vec::with_capacity(reps);
    let mut c = Vec::with_capacity(reps);
    for _ in 0..reps {
        let x = system.sample_initial(&mut rng);
        let y = model.sample(x, &mut rng);
        a.push(model.gamma_sup(y).ln().max(0.0));
        let marginal: f64 = system
            .stationary()
            .iter()
            .enumerate()
            .map(|(s, p)| p * model.density(y, s))
            .sum();
        b.push(marginal.ln().abs());
        c.push(others.iter().map(|g| g.gamma_sup(y).ln().max(0.0)).fold(0.0, f64::max));
    }
    Ok(IntegrabilityReport {
        log_plus_gamma_theta0: Estimate::from_samples(&a),
        abs_log_marginal: Estimate::from_samples(&b),
        sup_log_plus_gamma: Estimate::from_samples(&c),
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{ConfiguredFamily, HiddenSpec, ObservationSpec, Scalar};
    use crate::systems::ParameterBox;

    #[test]
    fn discrete_channel_has_zero_log_plus_gamma() {
        let fam = ConfiguredFamily::new(
            HiddenSpec::Flip2,
            ObservationSpec::Channel {
                matrix: vec![vec![0.8, 0.2], vec![0.1, 0.9]],
            },
            ParameterBox::interval(0.01, 0.99).unwrap(),
        )
        .unwrap();
        let t = ParameterPoint::scalar(0.3);
        let r = integrability_check(&fam, &t, &[ParameterPoint::scalar(0.5)], 1000, 1).unwrap();
        assert_eq!(r.log_plus_gamma_theta0.mean, 0.0);
        assert_eq!(r.sup_log_plus_gamma.mean, 0.0);
        assert!(r.abs_log_marginal.is_finite());
    }

    #[test]
    fn gaussian_bounded_by_peak() {
        let s = 0.2;
        let fam = ConfiguredFamily::new(
            HiddenSpec::Flip2,
            ObservationSpec::Gaussian {
                means: vec![0.0, 1.0],
                mean_scale: None,
                std: Scalar::Fixed(s),
            },
            ParameterBox::interval(0.01, 0.99).unwrap(),
        )
        .unwrap();
        let t = ParameterPoint::scalar(0.3);
        let r = integrability_check(&fam, &t, &[t.clone()], 10_000, 2).unwrap();
        let bound = (-(s * (2.0 * std::f64::consts::PI).sqrt()).ln()).max(0.0);
        assert!(r.log_plus_gamma_theta0.mean <= bound);
        assert!(r.log_plus_gamma_theta0.mean > 0.0);
        let again = integrability_check(&fam, &t, &[t.clone()], 10_000, 2).unwrap();
        assert_eq!(r, again);
        assert!(integrability_check(&fam, &t, &[], 99, 2).is_err());
    }
}
