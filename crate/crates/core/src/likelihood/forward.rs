use super::{check_inputs, LikelihoodMethod, LogLikelihoodResult};
use crate::error::Result;
use crate::observation::ObservationModel;
use crate::systems::MarkovSystem;

/// Scaled forward recursion.
///
/// `alpha_0 = pi * g(y_0 | .)`, `alpha_{k+1} = (alpha_k P) * g(y_{k+1} | .)`,
/// renormalized every step with the log of each scale accumulated.
pub fn forward_log_likelihood(
    system: &MarkovSystem,
    model: &ObservationModel,
    y: &[f64],
) -> Result<LogLikelihoodResult> {
    let size = system.size();
    check_inputs(size, model, y)?;
    let p: Vec<f64> = (0..size * size).map(|k| system.p(k / size, k % size)).collect();
    let mut alpha = system.stationary().to_vec();
    let mut next = vec![0.0; size];
    let mut g = vec![0.0; size];
    let mut loglik = 0.0;

    for (k, &obs) in y.iter().enumerate() {
        model.densities_into(obs, &mut g);
        if k > 0 {
            next.iter_mut().for_each(|v| *v = 0.0);
            for (a, &w) in alpha.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let row = &p[a * size..(a + 1) * size];
                for (n, &pab) in next.iter_mut().zip(row) {
                    *n += w * pab;
                }
            }
            std::mem::swap(&mut alpha, &mut next);
        }
        let mut scale = 0.0;
        for (a, gv) in alpha.iter_mut().zip(&g) {
            *a *= gv;
            scale += *a;
        }
        if scale <= 0.0 || !scale.is_finite() {
            return Ok(LogLikelihoodResult::exact(f64::NEG_INFINITY, LikelihoodMethod::Forward));
        }
        alpha.iter_mut().for_each(|a| *a /= scale);
        loglik += scale.ln();
    }
    Ok(LogLikelihoodResult::exact(loglik, LikelihoodMethod::Forward))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn flip(q: f64) -> MarkovSystem {
        MarkovSystem::from_stochastic(&[vec![1.0 - q, q], vec![q, 1.0 - q]]).unwrap()
    }

    #[test]
    fn single_observation_marginalizes() {
        let m = MarkovSystem::from_stochastic(&[vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap();
        let g = ObservationModel::gaussian(vec![-1.0, 2.0], 0.8).unwrap();
        let y = [0.4];
        let expected = (m.stationary()[0] * g.density(0.4, 0) + m.stationary()[1] * g.density(0.4, 1)).ln();
        let r = forward_log_likelihood(&m, &g, &y).unwrap();
        assert_abs_diff_eq!(r.loglik, expected, epsilon = 1e-15);
        assert_eq!(r.method, LikelihoodMethod::Forward);
        assert!(!r.zero_likelihood);
    }

    #[test]
    fn noiseless_channel_gives_cylinder_measure() {
        let m = MarkovSystem::from_stochastic(&[
            vec![0.2, 0.5, 0.3],
            vec![0.6, 0.0, 0.4],
            vec![0.1, 0.1, 0.8],
        ])
        .unwrap();
        let c = ObservationModel::identity_channel(3);
        let word = [2usize, 2, 0, 1, 2, 0, 0];
        let y: Vec<f64> = word.iter().map(|&a| a as f64).collect();
        let r = forward_log_likelihood(&m, &c, &y).unwrap();
        assert_abs_diff_eq!(r.loglik, m.cylinder_measure(&word).ln(), epsilon = 1e-13);
        // forbidden transition 1 -> 1
        let r = forward_log_likelihood(&m, &c, &[1.0, 1.0]).unwrap();
        assert!(r.zero_likelihood);
        assert_eq!(r.loglik, f64::NEG_INFINITY);
    }

    #[test]
    fn long_sequences_do_not_underflow() {
        let m = flip(0.2);
        let g = ObservationModel::gaussian(vec![0.0, 1.0], 0.5).unwrap();
        let y: Vec<f64> = (0..1_000_000).map(|k| ((k as u64 * 7919) % 13) as f64 / 6.0 - 0.5).collect();
        let r = forward_log_likelihood(&m, &g, &y).unwrap();
        assert!(r.loglik.is_finite());
        assert!(r.loglik < -1e5);
    }

    #[test]
    fn mismatched_alphabet_is_an_error() {
        let g = ObservationModel::gaussian(vec![0.0, 1.0, 2.0], 0.5).unwrap();
        assert!(forward_log_likelihood(&flip(0.3), &g, &[0.0]).is_err());
        let g = ObservationModel::gaussian(vec![0.0, 1.0], 0.5).unwrap();
        assert!(forward_log_likelihood(&flip(0.3), &g, &[]).is_err());
    }
}
