use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::observation::ObservationModel;
use crate::systems::MarkovSystem;

/// Largest hidden-path enumeration size the S5 check accepts.
pub const S5_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingCertificate {
    pub ell: usize,
    /// `max_{a,b} P^ell(a, b) / pi(b)`; absent when `P^ell` has a zero.
    pub l_theta: Option<f64>,
    pub primitive: bool,
}

/// Psi-mixing constant over cylinder events separated by `ell` steps:
/// `mu(A ∩ T^-(m+ell) B) <= L mu(A) mu(B)` with `L = max P^ell(a,b)/pi(b)`.
pub fn psi_mixing_constant(system: &MarkovSystem, ell: usize) -> Result<MixingCertificate> {
    if ell == 0 {
        return Err(invalid("mixing gap ell must be >= 1"));
    }
    let pk = system.transition_power(ell);
    let pi = system.stationary();
    let n = system.size();
    if pk.iter().any(|&x| x <= 0.0) {
        return Ok(MixingCertificate {
            ell,
            l_theta: None,
            primitive: false,
        });
    }
    let mut l = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            l = l.max(pk[(a, b)] / pi[b]);
        }
    }
    Ok(MixingCertificate {
        ell,
        l_theta: Some(l),
        primitive: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S5Check {
    /// `int prod_j p(w_j | T^{j(m+ell)} x) d mu(x)`.
    pub lhs: f64,
    /// `prod_j C * prod_j p(w_j)` with `C = L_theta`.
    pub rhs: f64,
    pub ratio: f64,
    pub c: f64,
    pub pass: bool,
}

/// Block transfer matrix `D(g_0) P D(g_1) ... P D(g_m)` of one observation block.
fn block_matrix(system: &MarkovSystem, model: &ObservationModel, block: &[f64]) -> DMatrix<f64> {
    let n = system.size();
    let diag = |y: f64| DMatrix::from_diagonal(&DVector::from_fn(n, |a, _| model.density(y, a)));
    let mut out = diag(block[0]);
    for &y in &block[1..] {
        out = out * system.transition() * diag(y);
    }
    out
}

/// Exact check of the block-mixing inequality with `C_m(theta, w) = L_theta`
/// for `t + 1` blocks `w_0 .. w_t`, each of `m + 1` observations, separated
/// by gaps of `ell` steps.
pub fn brute_force_s5_check(
    system: &MarkovSystem,
    model: &ObservationModel,
    m: usize,
    ell: usize,
    blocks: &[Vec<f64>],
) -> Result<S5Check> {
    if blocks.len() < 2 {
        return Err(invalid("need t >= 1, i.e. at least two blocks"));
    }
    if blocks.iter().any(|b| b.len() != m + 1) {
        return Err(invalid(format!("every block must hold m + 1 = {} observations", m + 1)));
    }
    if model.alphabet_size() != system.size() {
        return Err(invalid("observation model and system disagree on the alphabet"));
    }
    let t = blocks.len() - 1;
    let span = t * (m + ell) + m + 1;
    let paths = (system.size() as f64).powi(span as i32);
    if paths > S5_LIMIT {
        return Err(Error::TooLarge(paths));
    }
    let cert = psi_mixing_constant(system, ell)?;
    let Some(c) = cert.l_theta else {
        return Err(Error::NonPrimitive);
    };
    let n = system.size();
    let pi = DVector::from_column_slice(system.stationary());
    let ones = DVector::from_element(n, 1.0);
    let gap = system.transition_power(ell);

    let mats: Vec<DMatrix<f64>> = blocks.iter().map(|b| block_matrix(system, model, b)).collect();
    let mut row = mats[0].tr_mul(&pi);
    for mat in &mats[1..] {
        row = mat.tr_mul(&gap.tr_mul(&row));
    }
    let lhs = row.dot(&ones);
    let rhs = mats
        .iter()
        .map(|mat| c * mat.tr_mul(&pi).dot(&ones))
        .product::<f64>();
    let ratio = if rhs > 0.0 { lhs / rhs } else if lhs > 0.0 { f64::INFINITY } else { 0.0 };
    Ok(S5Check {
        lhs,
        rhs,
        ratio,
        c,
        pass: lhs <= rhs * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng as _;

    fn flip(q: f64) -> MarkovSystem {
        MarkovSystem::from_stochastic(&[vec![1.0 - q, q], vec![q, 1.0 - q]]).unwrap()
    }

    /// Enumerate every hidden path of the full span.
    fn enumerate_lhs(system: &MarkovSystem, model: &ObservationModel, m: usize, ell: usize, blocks: &[Vec<f64>]) -> f64 {
        let t = blocks.len() - 1;
        let span = t * (m + ell) + m + 1;
        let size = system.size();
        let total = size.pow(span as u32);
        let mut sum = 0.0;
        for code in 0..total {
            let mut path = vec![0; span];
            let mut c = code;
            for x in path.iter_mut().rev() {
                *x = c % size;
                c /= size;
            }
            let mut w = system.cylinder_measure(&path);
            for (j, block) in blocks.iter().enumerate() {
                for (i, &y) in block.iter().enumerate() {
                    w *= model.density(y, path[j * (m + ell) + i]);
                }
            }
            sum += w;
        }
        sum
    }

    #[test]
    fn iid_constant_is_one() {
        let m = MarkovSystem::from_stochastic(&[vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let c = psi_mixing_constant(&m, 1).unwrap();
        assert!((c.l_theta.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn period_two_is_not_primitive() {
        let m = flip(1.0);
        for ell in 1..6 {
            let c = psi_mixing_constant(&m, ell).unwrap();
            assert!(!c.primitive);
            assert!(c.l_theta.is_none());
        }
        assert!(psi_mixing_constant(&m, 0).is_err());
    }

    #[test]
    fn flip_quarter_constant() {
        let c = psi_mixing_constant(&flip(0.25), 1).unwrap();
        assert!((c.l_theta.unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn decays_to_one_with_spectral_bound() {
        for system in [
            flip(0.25),
            flip(0.1),
            MarkovSystem::from_stochastic(&[vec![0.2, 0.5, 0.3], vec![0.6, 0.1, 0.3], vec![0.1, 0.1, 0.8]]).unwrap(),
        ] {
            let lambda2 = system.second_eigenvalue_modulus();
            let min_pi = system.stationary().iter().copied().fold(f64::INFINITY, f64::min);
            for ell in 1..30 {
                let l = psi_mixing_constant(&system, ell).unwrap().l_theta.unwrap();
                assert!(l >= 1.0 - 1e-12);
                assert!(l - 1.0 <= 2.0 * lambda2.powi(ell as i32) / min_pi + 1e-12, "ell {ell}");
            }
        }
    }

    #[test]
    fn iid_s5_is_equality() {
        let m = MarkovSystem::from_stochastic(&[vec![0.4, 0.6], vec![0.4, 0.6]]).unwrap();
        let g = ObservationModel::gaussian(vec![0.0, 1.0], 0.7).unwrap();
        let blocks = vec![vec![0.2, 1.1], vec![-0.3, 0.9], vec![1.4, 0.0]];
        let r = brute_force_s5_check(&m, &g, 1, 1, &blocks).unwrap();
        assert!(r.pass);
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flip_gaussian_matches_enumeration() {
        let m = flip(0.25);
        let g = ObservationModel::gaussian(vec![0.0, 1.0], 0.5).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let blocks: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.random::<f64>() * 2.0 - 0.5).collect()).collect();
            let r = brute_force_s5_check(&m, &g, 2, 1, &blocks).unwrap();
            let oracle = enumerate_lhs(&m, &g, 2, 1, &blocks);
            assert!((r.lhs - oracle).abs() <= 1e-12 * oracle);
            assert!(r.pass);
            assert_eq!(r.c, 1.5);
        }
    }

    #[test]
    fn preconditions() {
        let m = flip(0.25);
        let g = ObservationModel::gaussian(vec![0.0, 1.0], 0.5).unwrap();
        assert!(brute_force_s5_check(&m, &g, 1, 1, &[vec![0.0, 0.0]]).is_err());
        assert!(brute_force_s5_check(&m, &g, 1, 1, &[vec![0.0], vec![0.0]]).is_err());
        let big = vec![vec![0.0; 10]; 4];
        assert!(matches!(brute_force_s5_check(&m, &g, 9, 1, &big), Err(Error::TooLarge(_))));
        assert!(matches!(
            brute_force_s5_check(&flip(1.0), &g, 1, 1, &[vec![0.0, 0.0], vec![0.0, 0.0]]),
            Err(Error::NonPrimitive)
        ));
    }
}
