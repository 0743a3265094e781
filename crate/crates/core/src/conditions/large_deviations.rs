use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::golden_section_max;
use crate::systems::perron::perron_right;
use crate::systems::MarkovSystem;

/// Search interval for the tilt parameter in the Legendre transform.
pub const TILT_BRACKET: f64 = 50.0;
const GOLDEN_TOL: f64 = 1e-10;
const RANGE_TOL: f64 = 1e-12;

/// Rate function of ergodic averages of a pair observable `f(x_k, x_{k+1})`,
/// `I(a) = sup_s (s a - Lambda(s))`, where `Lambda(s)` is the log Perron
/// root of the tilted matrix `P(a, b) exp(s f(a, b))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdRateFunction {
    size: usize,
    p: Vec<f64>,
    f: Vec<f64>,
    pub mean: f64,
    /// Range of achievable long-run averages: min and max cycle means of `f`
    /// on the transition graph.
    pub range: (f64, f64),
}

impl LdRateFunction {
    pub fn new(system: &MarkovSystem, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if !system.is_primitive() {
            return Err(Error::NonPrimitive);
        }
        let size = system.size();
        let p: Vec<f64> = (0..size * size).map(|k| system.p(k / size, k % size)).collect();
        let mut ftab = vec![0.0; size * size];
        for k in 0..size * size {
            if p[k] > 0.0 {
                let v = f(k / size, k % size);
                if !v.is_finite() {
                    return Err(crate::error::invalid(format!(
                        "observable is not finite on allowed pair ({}, {})",
                        k / size,
                        k % size
                    )));
                }
                ftab[k] = v;
            }
        }
        let pi = system.stationary();
        let mean = (0..size * size).map(|k| pi[k / size] * p[k] * ftab[k]).sum();
        let edges: Vec<(usize, usize, f64)> = (0..size * size)
            .filter(|&k| p[k] > 0.0)
            .map(|k| (k / size, k % size, ftab[k]))
            .collect();
        let range = (min_cycle_mean(size, &edges), max_cycle_mean(size, &edges));
        Ok(Self {
            size,
            p,
            f: ftab,
            mean,
            range,
        })
    }

    /// `Lambda(s)`. The tilt is shifted by the extreme value of `f` so every
    /// tilted entry stays in `[0, 1]`.
    pub fn log_mgf(&self, s: f64) -> f64 {
        let allowed = || self.p.iter().zip(&self.f).filter(|(p, _)| **p > 0.0).map(|(_, f)| *f);
        let shift = if s >= 0.0 {
            allowed().fold(f64::NEG_INFINITY, f64::max)
        } else {
            allowed().fold(f64::INFINITY, f64::min)
        };
        let n = self.size;
        let tilted = DMatrix::from_fn(n, n, |a, b| {
            let k = a * n + b;
            if self.p[k] > 0.0 {
                self.p[k] * (s * (self.f[k] - shift)).exp()
            } else {
                0.0
            }
        });
        match perron_right(&tilted) {
            Ok((root, _)) => s * shift + root.ln(),
            Err(_) => f64::NAN,
        }
    }

    /// `I(a)` and whether the maximizing tilt hit the search bracket.
    pub fn rate_with_flag(&self, a: f64) -> (f64, bool) {
        let (lo, hi) = self.range;
        if a < lo - RANGE_TOL || a > hi + RANGE_TOL {
            return (f64::INFINITY, false);
        }
        if hi - lo <= RANGE_TOL {
            return (0.0, false);
        }
        let g = golden_section_max(|s| s * a - self.log_mgf(s), -TILT_BRACKET, TILT_BRACKET, GOLDEN_TOL, 400);
        let at_edge = g.x.abs() > TILT_BRACKET - 1e-6;
        (g.value.max(0.0), at_edge)
    }

    pub fn rate(&self, a: f64) -> f64 {
        self.rate_with_flag(a).0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdRateReport {
    pub mean: f64,
    pub delta: f64,
    /// `I(mean + delta)`.
    pub rate_above: f64,
    /// `I(mean - delta)`.
    pub rate_below: f64,
    /// The maximizing tilt reached the edge of the search bracket.
    pub bracket_warning: bool,
    pub function: LdRateFunction,
}

impl LdRateReport {
    /// Decay rate of `P(|average - mean| > delta)`.
    pub fn rate(&self) -> f64 {
        self.rate_above.min(self.rate_below)
    }
}

pub fn ld_rate(system: &MarkovSystem, f: impl Fn(usize, usize) -> f64, delta: f64) -> Result<LdRateReport> {
    if !(delta >= 0.0) {
        return Err(crate::error::invalid("delta must be >= 0"));
    }
    let function = LdRateFunction::new(system, f)?;
    let (rate_above, w1) = function.rate_with_flag(function.mean + delta);
    let (rate_below, w2) = function.rate_with_flag(function.mean - delta);
    Ok(LdRateReport {
        mean: function.mean,
        delta,
        rate_above,
        rate_below,
        bracket_warning: w1 || w2,
        function,
    })
}

/// Karp's maximum mean cycle on a strongly connected graph with `n` nodes.
pub fn max_cycle_mean(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let neg = f64::NEG_INFINITY;
    // d[k][v]: heaviest walk of exactly k edges from node 0 to v
    let mut d = vec![vec![neg; n]; n + 1];
    d[0][0] = 0.0;
    for k in 1..=n {
        for &(u, v, w) in edges {
            if d[k - 1][u] > neg {
                d[k][v] = d[k][v].max(d[k - 1][u] + w);
            }
        }
    }
    let mut best = neg;
    for v in 0..n {
        if d[n][v] == neg {
            continue;
        }
        let mut worst = f64::INFINITY;
        for k in 0..n {
            if d[k][v] > neg {
                worst = worst.min((d[n][v] - d[k][v]) / (n - k) as f64);
            }
        }
        best = best.max(worst);
    }
    best
}

pub fn min_cycle_mean(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let negated: Vec<(usize, usize, f64)> = edges.iter().map(|&(u, v, w)| (u, v, -w)).collect();
    -max_cycle_mean(n, &negated)
}
