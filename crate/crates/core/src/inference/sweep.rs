use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{equivalence_distance, grid_mle, refine_mle, EquivalenceClass, GridOptions, LikelihoodEvaluator};
use crate::error::{invalid, Result};
use crate::exec::map_indexed;
use crate::family::ModelFamily;
use crate::rng::{child_seed, rng_from_seed};
use crate::simulate::simulate_with;
use crate::stats::quantile_sorted;
use crate::systems::ParameterPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub resolution: Vec<usize>,
    pub refine_iterations: usize,
    pub grid: GridOptions,
    /// Fill `wall_ms`; off by default so sweep output is reproducible.
    pub record_timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub replication: usize,
    pub theta_hat: Option<ParameterPoint>,
    pub distance: f64,
    /// Normalized log-likelihood at `theta_hat`.
    pub loglik: f64,
    pub wall_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryRow {
    pub n: usize,
    pub cells: usize,
    pub failures: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Seed of sweep cell `(n, replication)`.
pub fn cell_seed(seed: u64, n: usize, replication: usize) -> u64 {
    child_seed(child_seed(seed, n as u64), replication as u64)
}

/// Simulate `y_0^n` under `theta0` for every `(n, replication)` cell, fit
/// grid + refined MLE, and record the distance to `class`. Cell failures
/// are recorded in the row; the sweep continues.
pub fn consistency_sweep(
    family: &dyn ModelFamily,
    theta0: &ParameterPoint,
    class: &EquivalenceClass,
    n_list: &[usize],
    replications: usize,
    seed: u64,
    options: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n_list must be nonempty and strictly increasing"));
    }
    if replications == 0 {
        return Err(invalid("replications must be >= 1"));
    }
    if !family.parameter_box().contains(theta0) {
        return Err(invalid("theta0 lies outside the parameter box"));
    }
    let hidden = family.hidden(theta0)?;
    let model = family.observation(theta0)?;
    let cells = n_list.len() * replications;
    let rows = map_indexed(cells, |k| {
        let n = n_list[k / replications];
        let replication = k % replications;
        let start = Instant::now();
        let mut rng = rng_from_seed(cell_seed(seed, n, replication));
        let (_, y) = simulate_with(&hidden, &model, n, &mut rng);
        let fit = grid_mle(family, &y, &options.resolution, options.grid).map(|surface| {
            let evaluator = LikelihoodEvaluator {
                family,
                y: &y,
                mc: options.grid.mc,
            };
            refine_mle(
                &surface,
                |p| evaluator.evaluate(p).unwrap_or(f64::NEG_INFINITY),
                options.refine_iterations,
            )
        });
        let wall_ms = if options.record_timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        match fit {
            Ok(est) => SweepRow {
                n,
                replication,
                distance: equivalence_distance(&est.theta, class),
                loglik: est.value,
                theta_hat: Some(est.theta),
                wall_ms,
                error: None,
            },
            Err(e) => SweepRow {
                n,
                replication,
                theta_hat: None,
                distance: f64::NAN,
                loglik: f64::NAN,
                wall_ms,
                error: Some(e.to_string()),
            },
        }
    });
    Ok(rows)
}

/// Median and quartiles of the distance per `n`, over successful cells.
pub fn summarize_sweep(rows: &[SweepRow]) -> Vec<SweepSummaryRow> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let cell: Vec<&SweepRow> = rows.iter().filter(|r| r.n == n).collect();
            let mut d: Vec<f64> = cell.iter().filter(|r| r.error.is_none()).map(|r| r.distance).collect();
            d.sort_by(f64::total_cmp);
            SweepSummaryRow {
                n,
                cells: cell.len(),
                failures: cell.len() - d.len(),
                median: quantile_sorted(&d, 0.5),
                q1: quantile_sorted(&d, 0.25),
                q3: quantile_sorted(&d, 0.75),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{ConfiguredFamily, HiddenSpec, ObservationSpec};
    use crate::systems::ParameterBox;

    fn noiseless_bernoulli() -> ConfiguredFamily {
        ConfiguredFamily::new(
            HiddenSpec::Bernoulli,
            ObservationSpec::Channel {
                matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            },
            ParameterBox::interval(0.01, 0.99).unwrap(),
        )
        .unwrap()
    }

    fn options() -> SweepOptions {
        SweepOptions {
            resolution: vec![21],
            refine_iterations: 30,
            grid: GridOptions::default(),
            record_timing: false,
        }
    }

    #[test]
    fn deterministic_and_shaped() {
        let fam = noiseless_bernoulli();
        let theta0 = ParameterPoint::scalar(0.3);
        let cls = EquivalenceClass::singleton(theta0.clone());
        let a = consistency_sweep(&fam, &theta0, &cls, &[50, 500], 3, 4, &options()).unwrap();
        let b = consistency_sweep(&fam, &theta0, &cls, &[50, 500], 3, 4, &options()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        assert_eq!((a[4].n, a[4].replication), (500, 1));
        let summary = summarize_sweep(&a);
        assert_eq!(summary.len(), 2);
        assert_eq!(summary[1].failures, 0);
    }

    #[test]
    fn single_cell() {
        let fam = noiseless_bernoulli();
        let theta0 = ParameterPoint::scalar(0.3);
        let cls = EquivalenceClass::singleton(theta0.clone());
        let rows = consistency_sweep(&fam, &theta0, &cls, &[100], 1, 4, &options()).unwrap();
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn invalid_inputs() {
        let fam = noiseless_bernoulli();
        let theta0 = ParameterPoint::scalar(0.3);
        let cls = EquivalenceClass::singleton(theta0.clone());
        assert!(consistency_sweep(&fam, &theta0, &cls, &[100, 100], 1, 4, &options()).is_err());
        assert!(consistency_sweep(&fam, &theta0, &cls, &[100], 0, 4, &options()).is_err());
        let outside = ParameterPoint::scalar(1.3);
        assert!(consistency_sweep(&fam, &outside, &cls, &[100], 1, 4, &options()).is_err());
    }
}
