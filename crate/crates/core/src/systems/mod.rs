//! Parametrized hidden systems: shifts of finite type carrying one-step
//! Markov equilibrium measures, and interval maps coded by them.

mod coded;
mod markov;
mod params;
pub mod perron;
mod potential;
mod structure;

pub use coded::{CodedMap, CodedMapKind, F64_ORBIT_DIGITS};
pub use markov::MarkovSystem;
pub use params::{ParameterBox, ParameterPoint};
pub use potential::{LinearPotential, LogStochastic, PotentialFamily, PotentialFn, TabulatedPotential};
pub use structure::{Alphabet, TransitionStructure};

use crate::error::Result;

/// Equilibrium state of a two-coordinate potential on a primitive SFT.
pub fn build_markov_from_potential(
    structure: &TransitionStructure,
    potential: &dyn PotentialFamily,
    theta: &ParameterPoint,
) -> Result<MarkovSystem> {
    MarkovSystem::from_potential(structure, potential, theta)
}

/// Hidden dynamics at a fixed parameter.
#[derive(Debug, Clone)]
pub enum HiddenSystem {
    Markov(MarkovSystem),
    Coded(CodedMap),
}

impl HiddenSystem {
    /// Number of partition symbols the observation model sees.
    pub fn alphabet_size(&self) -> usize {
        match self {
            HiddenSystem::Markov(m) => m.size(),
            HiddenSystem::Coded(_) => 2,
        }
    }

    /// The Markov system itself, or the symbolic image of a coded map.
    pub fn symbolic(&self) -> MarkovSystem {
        match self {
            HiddenSystem::Markov(m) => m.clone(),
            HiddenSystem::Coded(c) => c.symbolic_system(),
        }
    }

    /// Hidden symbol trajectory `x_0 .. x_n`.
    pub fn sample_symbols(&self, n: usize, rng: &mut crate::rng::Rng) -> Vec<usize> {
        match self {
            HiddenSystem::Markov(m) => m.sample_trajectory_with(n, rng),
            HiddenSystem::Coded(c) => c.sample_orbit_symbols(n, rng),
        }
    }
}
