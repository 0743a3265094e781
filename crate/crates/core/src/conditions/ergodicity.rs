use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::observation::ObservationModel;
use crate::rng::rng_from_seed;
use crate::simulate::simulate_with;
use crate::systems::HiddenSystem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagRow {
    pub lag: usize,
    /// Empirical `P(Y_0 in A, Y_lag in B)`.
    pub joint: f64,
    /// `P(A) P(B)`.
    pub product: f64,
    pub gap: f64,
    /// `(1/lag) sum_{k=1}^{lag} joint_k - P(A) P(B)`.
    pub cesaro_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub m: usize,
    pub n: usize,
    /// Events are `A = B = {Y_0 <= threshold}`, the empirical mean.
    pub threshold: f64,
    pub p_event: f64,
    pub rows: Vec<LagRow>,
    pub max_abs_gap: f64,
    /// Cesaro gap at the largest requested lag.
    pub final_cesaro_gap: f64,
    /// `3 / sqrt(n)`.
    pub tolerance: f64,
}

/// Empirical mixing of the observation process on half-space events of the
/// first coordinate of `Y_0^m`: per-lag gaps and their Cesaro averages, all
/// estimated along one stationary path of length `n + max lag`.
pub fn ergodicity_diagnostic(
    hidden: &HiddenSystem,
    model: &ObservationModel,
    m: usize,
    lags: &[usize],
    n: usize,
    seed: u64,
) -> Result<ErgodicityReport> {
    if lags.is_empty() || lags.contains(&0) || lags.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("lags must be non-empty, positive and strictly increasing"));
    }
    if n < 2 {
        return Err(invalid("ergodicity diagnostic needs n >= 2"));
    }
    let max_lag = *lags.last().unwrap_or(&1);
    let (_, y) = simulate_with(hidden, model, n + max_lag + m, &mut rng_from_seed(seed));
    let threshold = y[..n].iter().sum::<f64>() / n as f64;
    let hit: Vec<bool> = y.iter().map(|&v| v <= threshold).collect();
    let p_event = hit[..n].iter().filter(|&&h| h).count() as f64 / n as f64;
    let product = p_event * p_event;

    let mut rows = Vec::with_capacity(lags.len());
    let mut cumulative = 0.0;
    let mut next = 0;
    for k in 1..=max_lag {
        let joint = (0..n).filter(|&i| hit[i] && hit[i + k]).count() as f64 / n as f64;
        cumulative += joint;
        if lags[next] == k {
            rows.push(LagRow {
                lag: k,
                joint,
                product,
                gap: joint - product,
                cesaro_gap: cumulative / k as f64 - product,
            });
            next += 1;
        }
    }
    let max_abs_gap = rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max);
    let final_cesaro_gap = rows.last().map_or(0.0, |r| r.cesaro_gap);
    Ok(ErgodicityReport {
        m,
        n,
        threshold,
        p_event,
        rows,
        max_abs_gap,
        final_cesaro_gap,
        tolerance: 3.0 / (n as f64).sqrt(),
    })
}
