//! Maximum likelihood estimation for dynamical systems observed through
//! noise.
//!
//! Hidden dynamics are shifts of finite type with one-step Markov
//! equilibrium measures (or interval maps coded by them); observations are
//! conditionally independent given the current hidden symbol. The crate
//! computes marginal likelihoods, approximate maximum likelihood estimates
//! and numerical evidence for the hypotheses under which those estimates are
//! consistent.

pub mod conditions;
pub mod error;
mod exec;
pub mod family;
pub mod harness;
pub mod inference;
pub mod likelihood;
pub mod observation;
pub mod optim;
pub mod rng;
pub mod simulate;
pub mod stats;
pub mod systems;

pub use error::{Error, Result};
pub use family::{ConfiguredFamily, HiddenSpec, ModelFamily, ObservationSpec, Scalar};
pub use observation::ObservationModel;
pub use systems::{HiddenSystem, MarkovSystem, ParameterBox, ParameterPoint};
