use super::{check_inputs, LikelihoodMethod, LogLikelihoodResult};
use crate::error::{Error, Result};
use crate::observation::ObservationModel;
use crate::systems::MarkovSystem;

/// Maximum number of hidden paths the oracle will enumerate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

/// Direct sum over every hidden path `x_0 .. x_n` of
/// `pi(x_0) prod g(y_j | x_j) prod P(x_j, x_{j+1})`, accumulated in log
/// space. Test oracle for [`super::forward_log_likelihood`].
pub fn brute_force_log_likelihood(
    system: &MarkovSystem,
    model: &ObservationModel,
    y: &[f64],
) -> Result<LogLikelihoodResult> {
    let size = system.size();
    check_inputs(size, model, y)?;
    let len = y.len();
    let paths = (size as f64).powi(len as i32);
    if paths > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(paths));
    }
    let log_g: Vec<Vec<f64>> = y
        .iter()
        .map(|&obs| (0..size).map(|a| model.log_density(obs, a)).collect())
        .collect();
    let log_pi: Vec<f64> = system.stationary().iter().map(|p| p.ln()).collect();
    let log_p: Vec<f64> = (0..size * size).map(|k| system.p(k / size, k % size).ln()).collect();

    let mut path = vec![0usize; len];
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    loop {
        let mut w = log_pi[path[0]] + log_g[0][path[0]];
        for j in 1..len {
            w += log_p[path[j - 1] * size + path[j]] + log_g[j][path[j]];
        }
        if w > f64::NEG_INFINITY {
            if w > max {
                sum = sum * (max - w).exp() + 1.0;
                max = w;
            } else {
                sum += (w - max).exp();
            }
        }
        // odometer
        let mut k = len;
        loop {
            if k == 0 {
                let loglik = if max == f64::NEG_INFINITY { max } else { max + sum.ln() };
                return Ok(LogLikelihoodResult::exact(loglik, LikelihoodMethod::BruteForce));
            }
            k -= 1;
            path[k] += 1;
            if path[k] < size {
                break;
            }
            path[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_path_uniform_sum() {
        // Uniform chain on 2 symbols, channel with g = 1/2 everywhere:
        // every one of the 16 paths has weight 1/2 * (1/2)^3 * (1/2)^4.
        let m = MarkovSystem::from_stochastic(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let c = ObservationModel::discrete_channel(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let y = [0.0, 1.0, 1.0, 0.0];
        let r = brute_force_log_likelihood(&m, &c, &y).unwrap();
        let expected = (16.0 * 0.5f64.powi(8)).ln();
        assert!((r.loglik - expected).abs() < 1e-14);
        assert_eq!(r.method, LikelihoodMethod::BruteForce);
    }

    #[test]
    fn too_large_is_rejected() {
        let m = MarkovSystem::from_stochastic(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let c = ObservationModel::identity_channel(2);
        let y = vec![0.0; 30];
        assert!(matches!(brute_force_log_likelihood(&m, &c, &y), Err(Error::TooLarge(_))));
    }

    #[test]
    fn empty_support_is_negative_infinity() {
        let m = MarkovSystem::from_stochastic(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let c = ObservationModel::discrete_channel(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let r = brute_force_log_likelihood(&m, &c, &[0.0, 2.0]).unwrap();
        assert!(r.zero_likelihood);
    }
}
