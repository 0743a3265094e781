//! Certificates and empirical diagnostics for the hypotheses of the
//! consistency theorem.
//!
//! Exact objects (mixing constants, rate functions, the block-mixing
//! inequality) are computed from transfer matrices. Hypotheses with no finite
//! certificate (integrability, continuity, ergodicity of the observations,
//! identifiability) are probed by seeded simulation, and every reported
//! expectation comes with a standard error. Pass thresholds use 3 sigma.

mod block_bound;
mod continuity;
mod ergodicity;
mod identifiability;
mod integrability;
mod large_deviations;
mod mixing;

pub use block_bound::{block_bound_check, BlockBoundReport};
pub use continuity::{continuity_scan, ContinuityReport, JUMP_RATIO_FLAG};
pub use ergodicity::{ergodicity_diagnostic, ErgodicityReport, LagRow};
pub use identifiability::{identifiability_separation, wilson_upper, SeparationReport};
pub use integrability::{integrability_check, Estimate, IntegrabilityReport};
pub use large_deviations::{ld_rate, max_cycle_mean, min_cycle_mean, LdRateFunction, LdRateReport, TILT_BRACKET};
pub use mixing::{brute_force_s5_check, psi_mixing_constant, MixingCertificate, S5Check, S5_LIMIT};

use crate::error::Result;
use crate::family::ModelFamily;
use crate::observation::ObservationModel;
use crate::systems::{MarkovSystem, ParameterPoint};

/// Symbolic Markov system and observation model of a family member. Coded
/// maps are replaced by their symbolic image, which has the same likelihood.
pub(crate) fn symbolic_member(family: &dyn ModelFamily, theta: &ParameterPoint) -> Result<(MarkovSystem, ObservationModel)> {
    Ok((family.hidden(theta)?.symbolic(), family.observation(theta)?))
}
