//! Approximate maximum likelihood: grid search over the parameter box,
//! golden-section refinement, distances to equivalence classes and the
//! consistency sweep.

mod equivalence;
mod grid;
mod refine;
mod sweep;

pub use equivalence::{detect_equivalent, equivalence_distance, EquivalenceClass, Symmetry};
pub use grid::{grid_mle, GridOptions, LikelihoodEvaluator, LogLikelihoodSurface, SurfacePoint, DEFAULT_RESOLUTION};
pub use refine::{refine_mle, RefinedEstimate, DEFAULT_REFINE_ITERATIONS};
pub use sweep::{cell_seed, consistency_sweep, summarize_sweep, SweepOptions, SweepRow, SweepSummaryRow};
