//! Generative model: hidden trajectory from the invariant measure, then
//! conditionally independent observations of each hidden symbol.

use serde::{Deserialize, Serialize};

use crate::observation::ObservationModel;
use crate::rng::{rng_from_seed, Rng};
use crate::systems::HiddenSystem;

/// `y_0 .. y_n` plus generation metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSequence {
    pub values: Vec<f64>,
    pub metadata: SequenceMetadata,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SequenceMetadata {
    pub model: String,
    pub theta0: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

impl ObservationSequence {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            metadata: SequenceMetadata::default(),
        }
    }

    /// Index of the last observation (`values.len() - 1`).
    pub fn n(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

/// Draw `(x_0 .. x_n, y_0 .. y_n)`.
pub fn simulate_with(
    hidden: &HiddenSystem,
    model: &ObservationModel,
    n: usize,
    rng: &mut Rng,
) -> (Vec<usize>, Vec<f64>) {
    let xs = hidden.sample_symbols(n, rng);
    let ys = xs.iter().map(|&a| model.sample(a, rng)).collect();
    (xs, ys)
}

/// Observations `y_0 .. y_n`, deterministic in `seed`.
pub fn simulate(hidden: &HiddenSystem, model: &ObservationModel, n: usize, seed: u64) -> Vec<f64> {
    simulate_with(hidden, model, n, &mut rng_from_seed(seed)).1
}
