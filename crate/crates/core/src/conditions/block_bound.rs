use serde::{Deserialize, Serialize};

use super::{psi_mixing_constant, symbolic_member};
use crate::error::{invalid, Error, Result};
use crate::exec::map_indexed;
use crate::family::ModelFamily;
use crate::likelihood::forward_log_likelihood;
use crate::observation::ObservationModel;
use crate::rng::{child_seed, rng_from_seed};
use crate::simulate::simulate_with;
use crate::stats::mean_and_se;
use crate::systems::{HiddenSystem, MarkovSystem, ParameterPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockBoundReport {
    pub m: usize,
    pub ell: usize,
    pub n: usize,
    pub reps: usize,
    /// Number of complete large blocks in `y_0^n`.
    pub blocks: usize,
    /// Mean of `sup_U (1/n) log p_theta(y_0^n)`.
    pub lhs: f64,
    pub lhs_std_error: f64,
    /// Mean of the pathwise parsed bound, normalized by `n`.
    pub rhs: f64,
    pub rhs_std_error: f64,
    /// Mean and standard error of `lhs - rhs` per replicate.
    pub mean_difference: f64,
    pub difference_std_error: f64,
    /// `E[sup_U log p_theta(Y_0^{m-1})]` over all parsed blocks.
    pub block_term: f64,
    /// `E[sup_U log+ gamma_theta(Y_0)]` over all gap observations.
    pub gap_term: f64,
    /// `sup_U log L_theta(ell + 1)`.
    pub log_c: f64,
    /// `(block_term + ell * gap_term + log_c) / (m + ell)`.
    pub rhs_expectation: f64,
    pub pass: bool,
}

struct Member {
    system: MarkovSystem,
    model: ObservationModel,
}

struct Replicate {
    lhs: f64,
    rhs: f64,
    block_sups: Vec<f64>,
    gap_sups: Vec<f64>,
}

/// Parses `y_0^n` into periods of `m + ell` observations, a large block of
/// `m` observations followed by a gap of `ell`, and compares
/// `sup_U (1/n) log p_theta(y_0^n)` against the bound obtained from the
/// block-mixing inequality with `C = L_theta(ell + 1)` and the envelope
/// `gamma_theta` on gap and trailing observations. The bound is pathwise, so
/// `pass` tests `E[lhs - rhs] <= 3 sigma`.
#[allow(clippy::too_many_arguments)]
pub fn block_bound_check(
    family: &dyn ModelFamily,
    theta0: &ParameterPoint,
    neighbourhood: &[ParameterPoint],
    m: usize,
    ell: usize,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<BlockBoundReport> {
    if neighbourhood.is_empty() {
        return Err(invalid("the neighbourhood U must be non-empty"));
    }
    if m == 0 || n == 0 || m > n + 1 {
        return Err(invalid("block bound needs 1 <= m <= n + 1"));
    }
    if reps < 2 {
        return Err(invalid("block bound needs reps >= 2"));
    }
    let (truth, truth_model) = symbolic_member(family, theta0)?;
    let members = neighbourhood
        .iter()
        .map(|t| symbolic_member(family, t).map(|(system, model)| Member { system, model }))
        .collect::<Result<Vec<_>>>()?;
    let mut log_c = f64::NEG_INFINITY;
    for member in &members {
        match psi_mixing_constant(&member.system, ell + 1)?.l_theta {
            Some(l) => log_c = log_c.max(l.ln()),
            None => return Err(Error::NonPrimitive),
        }
    }

    let period = m + ell;
    let blocks = (n + 1) / period + usize::from((n + 1) % period >= m);
    let hidden = HiddenSystem::Markov(truth);
    let norm = n as f64;

    let replicates = map_indexed(reps, |r| -> Result<Replicate> {
        let mut rng = rng_from_seed(child_seed(seed, r as u64));
        let (_, y) = simulate_with(&hidden, &truth_model, n, &mut rng);
        let mut lhs = f64::NEG_INFINITY;
        for member in &members {
            lhs = lhs.max(forward_log_likelihood(&member.system, &member.model, &y)?.loglik);
        }
        let mut block_sups = Vec::with_capacity(blocks);
        let mut gap_sups = Vec::new();
        for chunk in y.chunks(period) {
            let gaps = if chunk.len() >= m {
                let mut best = f64::NEG_INFINITY;
                for member in &members {
                    best = best.max(forward_log_likelihood(&member.system, &member.model, &chunk[..m])?.loglik);
                }
                block_sups.push(best);
                &chunk[m..]
            } else {
                chunk
            };
            for &v in gaps {
                let best = members
                    .iter()
                    .map(|mem| mem.model.gamma_sup(v).ln().max(0.0))
                    .fold(0.0, f64::max);
                gap_sups.push(best);
            }
        }
        let rhs = block_sups.iter().sum::<f64>() + block_sups.len() as f64 * log_c + gap_sups.iter().sum::<f64>();
        Ok(Replicate {
            lhs: lhs / norm,
            rhs: rhs / norm,
            block_sups,
            gap_sups,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let lhs: Vec<f64> = replicates.iter().map(|r| r.lhs).collect();
    let rhs: Vec<f64> = replicates.iter().map(|r| r.rhs).collect();
    let diff: Vec<f64> = replicates.iter().map(|r| r.lhs - r.rhs).collect();
    let (lhs_mean, lhs_se) = mean_and_se(&lhs);
    let (rhs_mean, rhs_se) = mean_and_se(&rhs);
    let (d_mean, d_se) = mean_and_se(&diff);
    let all_blocks: Vec<f64> = replicates.iter().flat_map(|r| r.block_sups.iter().copied()).collect();
    let all_gaps: Vec<f64> = replicates.iter().flat_map(|r| r.gap_sups.iter().copied()).collect();
    let block_term = mean_and_se(&all_blocks).0;
    let gap_term = if all_gaps.is_empty() { 0.0 } else { mean_and_se(&all_gaps).0 };
    let rhs_expectation = (block_term + ell as f64 * gap_term + log_c) / period as f64;
    Ok(BlockBoundReport {
        m,
        ell,
        n,
        reps,
        blocks,
        lhs: lhs_mean,
        lhs_std_error: lhs_se,
        rhs: rhs_mean,
        rhs_std_error: rhs_se,
        mean_difference: d_mean,
        difference_std_error: d_se,
        block_term,
        gap_term,
        log_c,
        rhs_expectation,
        pass: d_mean <= 3.0 * d_se.max(1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{ConfiguredFamily, HiddenSpec, ObservationSpec, Scalar};
    use crate::systems::ParameterBox;

    fn family(hidden: HiddenSpec) -> ConfiguredFamily {
        ConfiguredFamily::new(
            hidden,
            ObservationSpec::Gaussian {
                means: vec![0.0, 1.0],
                mean_scale: None,
                std: Scalar::Fixed(0.5),
            },
            ParameterBox::interval(0.01, 0.99).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn iid_singleton_is_additive() {
        let fam = family(HiddenSpec::Bernoulli);
        let t = ParameterPoint::scalar(0.3);
        let r = block_bound_check(&fam, &t, &[t.clone()], 10, 0, 199, 5, 3).unwrap();
        assert!(r.log_c.abs() < 1e-12);
        assert_eq!(r.blocks, 20);
        assert!((r.lhs - r.rhs).abs() < 1e-10);
        assert!(r.pass);
    }

    #[test]
    fn flip_neighbourhood_passes() {
        let fam = family(HiddenSpec::Flip2);
        let t0 = ParameterPoint::scalar(0.3);
        let u: Vec<_> = [0.26, 0.28, 0.3, 0.32, 0.34].iter().map(|&v| ParameterPoint::scalar(v)).collect();
        let r = block_bound_check(&fam, &t0, &u, 20, 1, 2000, 30, 4).unwrap();
        assert!(r.pass);
        assert!(r.lhs <= r.rhs);
        assert!(r.log_c > 0.0);
    }

    #[test]
    fn single_block_matches_first_term() {
        let fam = family(HiddenSpec::Flip2);
        let t = ParameterPoint::scalar(0.3);
        let r = block_bound_check(&fam, &t, &[t.clone()], 301, 1, 300, 5, 5).unwrap();
        assert_eq!(r.blocks, 1);
        assert!((r.block_term / 300.0 - r.lhs).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let fam = family(HiddenSpec::Flip2);
        let t = ParameterPoint::scalar(0.3);
        assert!(block_bound_check(&fam, &t, &[], 5, 1, 100, 5, 0).is_err());
        assert!(block_bound_check(&fam, &t, &[t.clone()], 0, 1, 100, 5, 0).is_err());
        assert!(block_bound_check(&fam, &t, &[t.clone()], 5, 1, 100, 1, 0).is_err());
    }
}
