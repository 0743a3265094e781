use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::family::ModelFamily;
use crate::likelihood::forward_log_likelihood;
use crate::rng::{child_seed, rng_from_seed};
use crate::simulate::simulate_with;
use crate::systems::{HiddenSystem, ParameterPoint};

const ORBIT_CAP: usize = 4096;

/// Parameter map under which the observation law is declared invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Symmetry {
    /// `theta[coord] -> 2 * center - theta[coord]`.
    Reflect { coord: usize, center: f64 },
    /// Exchange two coordinates.
    Swap { i: usize, j: usize },
}

impl Symmetry {
    pub fn apply(&self, p: &ParameterPoint) -> ParameterPoint {
        let mut q = p.clone();
        match *self {
            Symmetry::Reflect { coord, center } => q.0[coord] = 2.0 * center - p[coord],
            Symmetry::Swap { i, j } => q.0.swap(i, j),
        }
        q
    }
}

/// Finite representatives of `[theta_0]`, closed under declared symmetries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    pub representatives: Vec<ParameterPoint>,
    #[serde(default)]
    pub symmetries: Vec<Symmetry>,
}

impl EquivalenceClass {
    pub fn new(representatives: Vec<ParameterPoint>, symmetries: Vec<Symmetry>) -> Result<Self> {
        if representatives.is_empty() {
            return Err(invalid("equivalence class needs at least one representative"));
        }
        let d = representatives[0].dim();
        if representatives.iter().any(|r| r.dim() != d) {
            return Err(invalid("representatives must share a dimension"));
        }
        for s in &symmetries {
            let ok = match *s {
                Symmetry::Reflect { coord, .. } => coord < d,
                Symmetry::Swap { i, j } => i < d && j < d,
            };
            if !ok {
                return Err(invalid("symmetry refers to a coordinate outside the parameter dimension"));
            }
        }
        Ok(Self {
            representatives,
            symmetries,
        })
    }

    pub fn singleton(theta: ParameterPoint) -> Self {
        Self {
            representatives: vec![theta],
            symmetries: Vec::new(),
        }
    }

    /// Closure of the representatives under the symmetries.
    pub fn orbit(&self) -> Vec<ParameterPoint> {
        let mut points = self.representatives.clone();
        let mut frontier = 0;
        while frontier < points.len() && points.len() < ORBIT_CAP {
            let p = points[frontier].clone();
            frontier += 1;
            for s in &self.symmetries {
                let q = s.apply(&p);
                if !points.iter().any(|r| r.distance(&q) <= 1e-12) {
                    points.push(q);
                }
            }
        }
        points
    }
}

/// Euclidean distance from `theta` to the nearest point of the class orbit.
pub fn equivalence_distance(theta: &ParameterPoint, class: &EquivalenceClass) -> f64 {
    class
        .orbit()
        .iter()
        .map(|r| r.distance(theta))
        .fold(f64::INFINITY, f64::min)
}

/// Numerical class detector: the two parameters are flagged equivalent when
/// their forward log-likelihoods agree within `tol` on `sequences` random
/// observation sequences of length `len`, drawn under `a`.
pub fn detect_equivalent(
    family: &dyn ModelFamily,
    a: &ParameterPoint,
    b: &ParameterPoint,
    sequences: usize,
    len: usize,
    tol: f64,
    seed: u64,
) -> Result<bool> {
    if len == 0 {
        return Err(invalid("sequence length must be >= 1"));
    }
    let (HiddenSystem::Markov(ma), HiddenSystem::Markov(mb)) = (family.hidden(a)?, family.hidden(b)?) else {
        return Err(invalid("equivalence detection needs exact likelihoods (Markov hidden systems)"));
    };
    let ga = family.observation(a)?;
    let gb = family.observation(b)?;
    let hidden_a = HiddenSystem::Markov(ma.clone());
    for r in 0..sequences {
        let mut rng = rng_from_seed(child_seed(seed, r as u64));
        let (_, y) = simulate_with(&hidden_a, &ga, len - 1, &mut rng);
        let la = forward_log_likelihood(&ma, &ga, &y)?.loglik;
        let lb = forward_log_likelihood(&mb, &gb, &y)?.loglik;
        if !(la == lb || (la - lb).abs() <= tol) {
            return Ok(false);
        }
    }
    Ok(true)
}
