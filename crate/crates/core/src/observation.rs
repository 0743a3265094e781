//! Observation densities `g(y | a)` of the current hidden symbol `a`.
//!
//! Densities are taken with respect to counting measure for the discrete
//! channel and Lebesgue measure otherwise. Discrete observations are carried
//! as `f64` holding a non-negative integer symbol.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// Base of the shift metric `d(x, z) = beta^separation`.
pub const SHIFT_METRIC_BETA: f64 = 0.5;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObservationModel {
    /// `matrix[a][y]` is the probability of observing `y` from symbol `a`.
    DiscreteChannel { matrix: Vec<Vec<f64>> },
    Gaussian { means: Vec<f64>, std: f64 },
    Laplace { means: Vec<f64>, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMeasure {
    Counting,
    Lebesgue,
}

/// Constants of the observation-regularity bound
/// `K(y) = c6 * (c4 + c5 |y|)` and the partition base `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityConstants {
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub beta: f64,
}

impl RegularityConstants {
    pub fn k(&self, y: f64) -> f64 {
        self.c6 * (self.c4 + self.c5 * y.abs())
    }
}

/// Gaussian envelope `c1^-1 exp(-c2 y^2) <= g(y | x) <= c1 exp(-c3 y^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBounds {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl NoiseBounds {
    /// Bounds valid for every Gaussian with `|mean| <= max_abs_mean` and
    /// `std` in `[std_lo, std_hi]`. Uses `(y - m)^2 >= y^2 / 2 - m^2` and
    /// `(y - m)^2 <= 2 y^2 + 2 m^2`.
    pub fn gaussian(max_abs_mean: f64, std_lo: f64, std_hi: f64) -> Result<Self> {
        if !(std_lo > 0.0 && std_lo <= std_hi) {
            return Err(invalid("need 0 < std_lo <= std_hi"));
        }
        let m2 = max_abs_mean * max_abs_mean;
        let upper = (m2 / (2.0 * std_lo * std_lo) - LN_SQRT_2PI - std_lo.ln()).exp();
        let lower = (-m2 / (std_lo * std_lo) - LN_SQRT_2PI - std_hi.ln()).exp();
        Ok(Self {
            c1: upper.max(1.0 / lower),
            c2: 1.0 / (std_lo * std_lo),
            c3: 1.0 / (4.0 * std_hi * std_hi),
        })
    }

    pub fn holds(&self, y: f64, density: f64) -> bool {
        let lo = (-self.c2 * y * y).exp() / self.c1;
        let hi = self.c1 * (-self.c3 * y * y).exp();
        // the lower envelope is attained at y = -mean
        lo * (1.0 - 1e-12) <= density && density <= hi * (1.0 + 1e-12)
    }
}

impl ObservationModel {
    pub fn discrete_channel(matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.is_empty() {
            return Err(invalid("channel matrix is empty"));
        }
        let cols = matrix[0].len();
        for (a, row) in matrix.iter().enumerate() {
            if row.len() != cols || cols == 0 {
                return Err(invalid("channel matrix rows must have equal, nonzero length"));
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(invalid(format!("channel row {a} has an entry outside [0, 1]")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(invalid(format!("channel row {a} sums to {s}")));
            }
        }
        Ok(Self::DiscreteChannel { matrix })
    }

    /// Binary symmetric channel with the given crossover probability.
    pub fn binary_symmetric(crossover: f64) -> Result<Self> {
        Self::discrete_channel(vec![vec![1.0 - crossover, crossover], vec![crossover, 1.0 - crossover]])
    }

    pub fn identity_channel(size: usize) -> Self {
        let matrix = (0..size)
            .map(|a| (0..size).map(|y| if a == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::DiscreteChannel { matrix }
    }

    pub fn gaussian(means: Vec<f64>, std: f64) -> Result<Self> {
        if !(std > 0.0 && std.is_finite()) {
            return Err(invalid(format!("gaussian std must be positive, got {std}")));
        }
        if means.is_empty() || means.iter().any(|m| !m.is_finite()) {
            return Err(invalid("gaussian means must be finite and nonempty"));
        }
        Ok(Self::Gaussian { means, std })
    }

    pub fn laplace(means: Vec<f64>, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("laplace scale must be positive, got {scale}")));
        }
        if means.is_empty() || means.iter().any(|m| !m.is_finite()) {
            return Err(invalid("laplace means must be finite and nonempty"));
        }
        Ok(Self::Laplace { means, scale })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::DiscreteChannel { .. } => "discrete_channel",
            Self::Gaussian { .. } => "gaussian",
            Self::Laplace { .. } => "laplace",
        }
    }

    /// Number of hidden symbols the model is defined for.
    pub fn alphabet_size(&self) -> usize {
        match self {
            Self::DiscreteChannel { matrix } => matrix.len(),
            Self::Gaussian { means, .. } | Self::Laplace { means, .. } => means.len(),
        }
    }

    /// Size of the finite observation space, `None` for continuous models.
    pub fn output_size(&self) -> Option<usize> {
        match self {
            Self::DiscreteChannel { matrix } => Some(matrix[0].len()),
            _ => None,
        }
    }

    pub fn reference_measure(&self) -> ReferenceMeasure {
        match self {
            Self::DiscreteChannel { .. } => ReferenceMeasure::Counting,
            _ => ReferenceMeasure::Lebesgue,
        }
    }

    /// Is `y` a point of the observation space?
    pub fn is_valid_observation(&self, y: f64) -> bool {
        match self {
            Self::DiscreteChannel { matrix } => channel_index(y, matrix[0].len()).is_some(),
            _ => y.is_finite(),
        }
    }

    /// `g(y | a)`.
    pub fn density(&self, y: f64, a: usize) -> f64 {
        match self {
            Self::DiscreteChannel { matrix } => {
                channel_index(y, matrix[a].len()).map_or(0.0, |k| matrix[a][k])
            }
            _ => self.log_density(y, a).exp(),
        }
    }

    /// `log g(y | a)`; `-inf` where the density vanishes.
    pub fn log_density(&self, y: f64, a: usize) -> f64 {
        match self {
            Self::DiscreteChannel { .. } => self.density(y, a).ln(),
            Self::Gaussian { means, std } => {
                let z = (y - means[a]) / std;
                -LN_SQRT_2PI - std.ln() - 0.5 * z * z
            }
            Self::Laplace { means, scale } => -(2.0 * scale).ln() - (y - means[a]).abs() / scale,
        }
    }

    /// Fill `out[a] = g(y | a)` for every symbol.
    pub fn densities_into(&self, y: f64, out: &mut [f64]) {
        for (a, o) in out.iter_mut().enumerate() {
            *o = self.density(y, a);
        }
    }

    pub fn sample(&self, a: usize, rng: &mut Rng) -> f64 {
        match self {
            Self::DiscreteChannel { matrix } => {
                let u: f64 = rng.random();
                let row = &matrix[a];
                let mut acc = 0.0;
                for (k, p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return k as f64;
                    }
                }
                row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1) as f64
            }
            Self::Gaussian { means, std } => Normal::new(means[a], *std)
                .expect("std validated positive")
                .sample(rng),
            Self::Laplace { means, scale } => {
                let u: f64 = rng.random::<f64>() - 0.5;
                means[a] - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
        }
    }

    pub fn sample_seeded(&self, a: usize, seed: u64) -> f64 {
        self.sample(a, &mut rng_from_seed(seed))
    }

    /// `gamma(y) = max_a g(y | a)`.
    pub fn gamma_sup(&self, y: f64) -> f64 {
        (0..self.alphabet_size())
            .map(|a| self.density(y, a))
            .fold(0.0, f64::max)
    }

    pub fn regularity_constants(&self) -> RegularityConstants {
        match self {
            // Worst log ratio over outputs; infinite if a column mixes zero
            // and positive entries.
            Self::DiscreteChannel { matrix } => RegularityConstants {
                c4: (0..matrix[0].len()).map(|y| channel_log_ratio(matrix, y)).fold(0.0, f64::max),
                c5: 0.0,
                c6: 1.0,
                beta: SHIFT_METRIC_BETA,
            },
            Self::Gaussian { means, std } => {
                let s2 = std * std;
                let max_abs = means.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                RegularityConstants {
                    c4: max_abs / s2,
                    c5: 1.0 / s2,
                    c6: mean_range(means),
                    beta: SHIFT_METRIC_BETA,
                }
            }
            // K = Lip(mean) / b, written as c6 * c4 with c5 = 0.
            Self::Laplace { means, scale } => RegularityConstants {
                c4: 1.0 / scale,
                c5: 0.0,
                c6: mean_range(means),
                beta: SHIFT_METRIC_BETA,
            },
        }
    }

    /// `K(y)` with `g(y | x) <= g(y | z) exp(K(y) d(x, z))` in the shift
    /// metric. Points with different current symbols are at distance
    /// `beta^0 = 1`; points sharing it have equal densities.
    pub fn lipschitz_k(&self, y: f64) -> f64 {
        match self {
            Self::DiscreteChannel { matrix } => match channel_index(y, matrix[0].len()) {
                Some(j) => channel_log_ratio(matrix, j),
                None => 0.0,
            },
            _ => self.regularity_constants().k(y),
        }
    }

    /// Gaussian envelope constants for this single model.
    pub fn noise_bounds(&self) -> Result<NoiseBounds> {
        match self {
            Self::Gaussian { means, std } => {
                let max_abs = means.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                NoiseBounds::gaussian(max_abs, *std, *std)
            }
            _ => Err(Error::UnsupportedVariant("gaussian noise bounds")),
        }
    }

    /// Is `g(y | a)` the same for every symbol?
    pub fn is_symbol_independent(&self) -> bool {
        match self {
            Self::DiscreteChannel { matrix } => matrix.windows(2).all(|w| w[0] == w[1]),
            Self::Gaussian { means, .. } | Self::Laplace { means, .. } => mean_range(means) == 0.0,
        }
    }
}

fn mean_range(means: &[f64]) -> f64 {
    let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// `max_{a,b} log(g(y | a) / g(y | b))` for output `y`; zero when the
/// column is identically zero.
fn channel_log_ratio(matrix: &[Vec<f64>], y: usize) -> f64 {
    let hi = matrix.iter().map(|r| r[y]).fold(0.0, f64::max);
    let lo = matrix.iter().map(|r| r[y]).fold(f64::INFINITY, f64::min);
    if hi == 0.0 {
        0.0
    } else {
        (hi / lo).ln()
    }
}

fn channel_index(y: f64, size: usize) -> Option<usize> {
    if y >= 0.0 && y.fract() == 0.0 && y < size as f64 {
        Some(y as usize)
    } else {
        None
    }
}

/// Free-function form of [`ObservationModel::density`].
pub fn density(model: &ObservationModel, y: f64, a: usize) -> f64 {
    model.density(y, a)
}

/// Free-function form of [`ObservationModel::gamma_sup`].
pub fn gamma_sup(model: &ObservationModel, y: f64) -> f64 {
    model.gamma_sup(y)
}

/// Free-function form of [`ObservationModel::lipschitz_k`].
pub fn lipschitz_k(model: &ObservationModel, y: f64) -> f64 {
    model.lipschitz_k(y)
}
