//! Parametric families `theta -> (hidden system, observation model)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::observation::ObservationModel;
use crate::systems::{
    CodedMap, HiddenSystem, LinearPotential, MarkovSystem, ParameterBox, ParameterPoint, TabulatedPotential,
    TransitionStructure,
};

/// A family of observed systems indexed by a parameter box.
pub trait ModelFamily: Send + Sync {
    fn name(&self) -> String;
    fn parameter_box(&self) -> &ParameterBox;
    fn hidden(&self, theta: &ParameterPoint) -> Result<HiddenSystem>;
    fn observation(&self, theta: &ParameterPoint) -> Result<ObservationModel>;
}

/// A real number that is either fixed or read from a parameter coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scalar {
    Fixed(f64),
    Theta(usize),
}

impl Scalar {
    pub fn eval(&self, theta: &ParameterPoint) -> f64 {
        match *self {
            Scalar::Fixed(v) => v,
            Scalar::Theta(i) => theta[i],
        }
    }

    fn max_index(&self) -> Option<usize> {
        match *self {
            Scalar::Fixed(_) => None,
            Scalar::Theta(i) => Some(i),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenSpec {
    /// Two-state chain flipping with probability `theta[0]`.
    Flip2,
    /// I.i.d. symbols with `P(1) = theta[0]`.
    Bernoulli,
    /// Gibbs state of `phi(a, b) = theta[0] * table[a][b]` on the SFT.
    PotentialLinear { structure: TransitionStructure, table: Vec<Vec<f64>> },
    /// Gibbs state of a potential tabulated at several theta values.
    PotentialTable { structure: TransitionStructure, potential: TabulatedPotential },
    /// A fixed chain; theta only moves the observation model.
    Markov { matrix: Vec<Vec<f64>> },
    /// Doubling map with Lebesgue measure; theta only moves the observation model.
    Doubling { coding_depth: usize },
}

impl HiddenSpec {
    pub fn name(&self) -> &'static str {
        match self {
            HiddenSpec::Flip2 => "flip2",
            HiddenSpec::Bernoulli => "bernoulli",
            HiddenSpec::PotentialLinear { .. } => "potential-linear",
            HiddenSpec::PotentialTable { .. } => "potential-table",
            HiddenSpec::Markov { .. } => "markov",
            HiddenSpec::Doubling { .. } => "doubling",
        }
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            HiddenSpec::Flip2 | HiddenSpec::Bernoulli | HiddenSpec::Doubling { .. } => 2,
            HiddenSpec::PotentialLinear { structure, .. } | HiddenSpec::PotentialTable { structure, .. } => {
                structure.size()
            }
            HiddenSpec::Markov { matrix } => matrix.len(),
        }
    }

    fn uses_theta(&self) -> bool {
        !matches!(self, HiddenSpec::Markov { .. } | HiddenSpec::Doubling { .. })
    }

    pub fn build(&self, theta: &ParameterPoint) -> Result<HiddenSystem> {
        Ok(match self {
            HiddenSpec::Flip2 => {
                let q = probability(theta[0], "flip probability")?;
                HiddenSystem::Markov(MarkovSystem::from_stochastic(&[vec![1.0 - q, q], vec![q, 1.0 - q]])?)
            }
            HiddenSpec::Bernoulli => {
                let p = probability(theta[0], "Bernoulli probability")?;
                HiddenSystem::Markov(MarkovSystem::from_stochastic(&[vec![1.0 - p, p], vec![1.0 - p, p]])?)
            }
            HiddenSpec::PotentialLinear { structure, table } => HiddenSystem::Markov(MarkovSystem::from_potential(
                structure,
                &LinearPotential { table: table.clone() },
                theta,
            )?),
            HiddenSpec::PotentialTable { structure, potential } => {
                HiddenSystem::Markov(MarkovSystem::from_potential(structure, potential, theta)?)
            }
            HiddenSpec::Markov { matrix } => HiddenSystem::Markov(MarkovSystem::from_stochastic(matrix)?),
            HiddenSpec::Doubling { coding_depth } => HiddenSystem::Coded(CodedMap::doubling(*coding_depth)?),
        })
    }
}

fn probability(p: f64, what: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(invalid(format!("{what} {p} is outside [0, 1]")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationSpec {
    /// `N(scale * means[a], std^2)`; `mean_scale` defaults to 1.
    Gaussian { means: Vec<f64>, mean_scale: Option<Scalar>, std: Scalar },
    /// Laplace law centred at `scale * means[a]` with scale `b`.
    Laplace { means: Vec<f64>, mean_scale: Option<Scalar>, b: Scalar },
    /// Fixed channel matrix.
    Channel { matrix: Vec<Vec<f64>> },
    /// Binary symmetric channel.
    Bsc { crossover: Scalar },
}

impl ObservationSpec {
    pub fn build(&self, theta: &ParameterPoint) -> Result<ObservationModel> {
        let scaled = |means: &[f64], s: &Option<Scalar>| -> Vec<f64> {
            let k = s.map_or(1.0, |s| s.eval(theta));
            means.iter().map(|m| k * m).collect()
        };
        match self {
            ObservationSpec::Gaussian { means, mean_scale, std } => {
                ObservationModel::gaussian(scaled(means, mean_scale), std.eval(theta))
            }
            ObservationSpec::Laplace { means, mean_scale, b } => {
                ObservationModel::laplace(scaled(means, mean_scale), b.eval(theta))
            }
            ObservationSpec::Channel { matrix } => ObservationModel::discrete_channel(matrix.clone()),
            ObservationSpec::Bsc { crossover } => {
                ObservationModel::binary_symmetric(probability(crossover.eval(theta), "crossover")?)
            }
        }
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            ObservationSpec::Gaussian { means, .. } | ObservationSpec::Laplace { means, .. } => means.len(),
            ObservationSpec::Channel { matrix } => matrix.len(),
            ObservationSpec::Bsc { .. } => 2,
        }
    }

    fn max_theta_index(&self) -> Option<usize> {
        match self {
            ObservationSpec::Gaussian { mean_scale, std, .. } => {
                mean_scale.and_then(|s| s.max_index()).max(std.max_index())
            }
            ObservationSpec::Laplace { mean_scale, b, .. } => mean_scale.and_then(|s| s.max_index()).max(b.max_index()),
            ObservationSpec::Channel { .. } => None,
            ObservationSpec::Bsc { crossover } => crossover.max_index(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, ObservationSpec::Channel { .. } | ObservationSpec::Bsc { .. })
    }
}

/// Family assembled from a hidden spec, an observation spec and a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfiguredFamily {
    pub hidden: HiddenSpec,
    pub observation: ObservationSpec,
    pub parameter_box: ParameterBox,
}

impl ConfiguredFamily {
    pub fn new(hidden: HiddenSpec, observation: ObservationSpec, parameter_box: ParameterBox) -> Result<Self> {
        if hidden.alphabet_size() != observation.alphabet_size() {
            return Err(invalid(format!(
                "hidden system has {} symbols but the observation model covers {}",
                hidden.alphabet_size(),
                observation.alphabet_size()
            )));
        }
        let needed = observation
            .max_theta_index()
            .map(|i| i + 1)
            .max(hidden.uses_theta().then_some(1))
            .unwrap_or(0);
        if needed > parameter_box.dim() {
            return Err(invalid(format!(
                "family reads theta[{}] but the parameter box has dimension {}",
                needed - 1,
                parameter_box.dim()
            )));
        }
        if let HiddenSpec::PotentialTable { potential, .. } = &hidden {
            if potential.thetas.is_empty()
                || potential.thetas.len() != potential.tables.len()
                || potential.thetas.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(invalid("potential table needs strictly increasing thetas, one table each"));
            }
        }
        Ok(Self {
            hidden,
            observation,
            parameter_box,
        })
    }
}

impl ModelFamily for ConfiguredFamily {
    fn name(&self) -> String {
        self.hidden.name().to_string()
    }

    fn parameter_box(&self) -> &ParameterBox {
        &self.parameter_box
    }

    fn hidden(&self, theta: &ParameterPoint) -> Result<HiddenSystem> {
        self.hidden.build(theta)
    }

    fn observation(&self, theta: &ParameterPoint) -> Result<ObservationModel> {
        self.observation.build(theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip2_gaussian_family() {
        let f = ConfiguredFamily::new(
            HiddenSpec::Flip2,
            ObservationSpec::Gaussian {
                means: vec![0.0, 1.0],
                mean_scale: None,
                std: Scalar::Fixed(0.5),
            },
            ParameterBox::interval(0.01, 0.99).unwrap(),
        )
        .unwrap();
        let theta = ParameterPoint::scalar(0.3);
        match f.hidden(&theta).unwrap() {
            HiddenSystem::Markov(m) => assert_eq!(m.p(0, 1), 0.3),
            HiddenSystem::Coded(_) => panic!("expected a chain"),
        }
        assert!(f.hidden(&ParameterPoint::scalar(1.5)).is_err());
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let r = ConfiguredFamily::new(
            HiddenSpec::Flip2,
            ObservationSpec::Channel {
                matrix: vec![vec![1.0]; 3],
            },
            ParameterBox::interval(0.0, 1.0).unwrap(),
        );
        assert!(r.is_err());
        let r = ConfiguredFamily::new(
            HiddenSpec::Doubling { coding_depth: 40 },
            ObservationSpec::Gaussian {
                means: vec![0.0, 1.0],
                mean_scale: None,
                std: Scalar::Theta(1),
            },
            ParameterBox::interval(0.1, 1.0).unwrap(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn theta_driven_observation() {
        let f = ConfiguredFamily::new(
            HiddenSpec::Doubling { coding_depth: 40 },
            ObservationSpec::Gaussian {
                means: vec![-1.0, 1.0],
                mean_scale: Some(Scalar::Theta(0)),
                std: Scalar::Fixed(0.3),
            },
            ParameterBox::interval(0.0, 2.0).unwrap(),
        )
        .unwrap();
        let m = f.observation(&ParameterPoint::scalar(1.5)).unwrap();
        assert_eq!(m, ObservationModel::gaussian(vec![-1.5, 1.5], 0.3).unwrap());
    }
}
