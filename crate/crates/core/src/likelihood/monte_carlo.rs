use super::{check_inputs, LikelihoodMethod, LogLikelihoodResult};
use crate::error::{invalid, Error, Result};
use crate::exec::map_indexed;
use crate::observation::ObservationModel;
use crate::rng::{child_seed, rng_from_seed};
use crate::systems::HiddenSystem;

pub const DEFAULT_MC_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        }
    }
}

/// Monte Carlo estimate of `log int p(y_0^n | x) d mu(x)`.
///
/// Draws `x ~ mu` (a stationary Markov path, or a uniform point iterated by
/// the coded map), scores `sum_j log g(y_j | x_j)`, and aggregates with a
/// max-shifted log-mean-exp. Sample `i` uses `child_seed(seed, i)`. The
/// standard error and bias are leave-one-out jackknife estimates; an
/// effective sample size below 2 is reported, not raised.
pub fn mc_log_likelihood(
    hidden: &HiddenSystem,
    model: &ObservationModel,
    y: &[f64],
    options: McOptions,
) -> Result<LogLikelihoodResult> {
    check_inputs(hidden.alphabet_size(), model, y)?;
    let big_n = options.samples;
    if big_n < 2 {
        return Err(invalid("Monte Carlo needs at least 2 samples"));
    }
    let n = y.len() - 1;
    if let HiddenSystem::Coded(map) = hidden {
        if n + 1 > map.coding_depth() {
            return Err(Error::DepthExceeded {
                requested: n + 1,
                depth: map.coding_depth(),
            });
        }
    }

    let scores: Vec<f64> = map_indexed(big_n, |i| {
        let mut rng = rng_from_seed(child_seed(options.seed, i as u64));
        let symbols = match hidden {
            HiddenSystem::Markov(m) => m.sample_trajectory_with(n, &mut rng),
            HiddenSystem::Coded(c) => c.sample_orbit(n, &mut rng).expect("orbit length checked above"),
        };
        symbols.iter().zip(y).map(|(&a, &obs)| model.log_density(obs, a)).sum()
    });

    Ok(aggregate(&scores))
}

fn aggregate(scores: &[f64]) -> LogLikelihoodResult {
    let big_n = scores.len() as f64;
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogLikelihoodResult {
            loglik: f64::NEG_INFINITY,
            method: LikelihoodMethod::MonteCarlo,
            mc_std_error: Some(0.0),
            mc_bias: Some(0.0),
            effective_sample_size: Some(0.0),
            zero_likelihood: true,
        };
    }
    let weights: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let total_sq: f64 = weights.iter().map(|w| w * w).sum();
    let loglik = max + (total / big_n).ln();

    // Leave-one-out estimates relative to the full estimate:
    // log((S - w_i) / (N - 1)) - log(S / N) = ln(1 - w_i / S) + ln(N / (N - 1)).
    let shift = (big_n / (big_n - 1.0)).ln();
    let deltas: Vec<f64> = weights.iter().map(|w| (-w / total).ln_1p() + shift).collect();
    let (std_error, bias) = if deltas.iter().all(|d| d.is_finite()) {
        let mean = deltas.iter().sum::<f64>() / big_n;
        let var = deltas.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() * (big_n - 1.0) / big_n;
        (var.sqrt(), (big_n - 1.0) * mean)
    } else {
        (f64::INFINITY, f64::NAN)
    };
    LogLikelihoodResult {
        loglik,
        method: LikelihoodMethod::MonteCarlo,
        mc_std_error: Some(std_error),
        mc_bias: Some(bias),
        effective_sample_size: Some(total * total / total_sq),
        zero_likelihood: false,
    }
}

impl LogLikelihoodResult {
    /// Effective sample size below 2.
    pub fn degenerate_weights(&self) -> bool {
        self.effective_sample_size.is_some_and(|e| e < 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::forward_log_likelihood;
    use crate::simulate::simulate;
    use crate::systems::{CodedMap, MarkovSystem};

    #[test]
    fn constant_integrand_is_exact() {
        let m = MarkovSystem::from_stochastic(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let g = ObservationModel::gaussian(vec![0.3, 0.3], 0.7).unwrap();
        let y = [0.1, -0.4, 1.2, 0.0];
        let expected: f64 = y.iter().map(|&v| g.log_density(v, 0)).sum();
        for samples in [2, 17, 1000] {
            let r = mc_log_likelihood(&HiddenSystem::Markov(m.clone()), &g, &y, McOptions { samples, seed: 3 }).unwrap();
            assert!((r.loglik - expected).abs() < 1e-13);
            assert!(r.mc_std_error.unwrap() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_forward() {
        let m = MarkovSystem::from_stochastic(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let g = ObservationModel::gaussian(vec![0.0, 1.0], 1.0).unwrap();
        let hidden = HiddenSystem::Markov(m.clone());
        let y = simulate(&hidden, &g, 20, 21);
        let exact = forward_log_likelihood(&m, &g, &y).unwrap().loglik;
        let r = mc_log_likelihood(&hidden, &g, &y, McOptions { samples: 100_000, seed: 8 }).unwrap();
        let se = r.mc_std_error.unwrap();
        assert!((r.loglik - exact).abs() < 3.0 * se, "mc {} exact {exact} se {se}", r.loglik);
        assert!(r.mc_bias.unwrap() <= 0.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let hidden = HiddenSystem::Coded(CodedMap::doubling(48).unwrap());
        let g = ObservationModel::gaussian(vec![0.0, 1.0], 0.4).unwrap();
        let y = simulate(&hidden, &g, 10, 1);
        let a = mc_log_likelihood(&hidden, &g, &y, McOptions { samples: 500, seed: 5 }).unwrap();
        let b = mc_log_likelihood(&hidden, &g, &y, McOptions { samples: 500, seed: 5 }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn orbit_beyond_depth_is_rejected() {
        let hidden = HiddenSystem::Coded(CodedMap::doubling(8).unwrap());
        let g = ObservationModel::gaussian(vec![0.0, 1.0], 0.4).unwrap();
        assert!(mc_log_likelihood(&hidden, &g, &[0.0; 9], McOptions::default()).is_err());
        assert!(mc_log_likelihood(&hidden, &g, &[0.0; 3], McOptions { samples: 1, seed: 0 }).is_err());
    }

    #[test]
    fn single_dominant_weight_is_degenerate() {
        let r = aggregate(&[0.0, -800.0, -900.0]);
        assert!(r.degenerate_weights());
        assert!(r.loglik.is_finite());
    }
}
