use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::map_indexed;
use crate::family::ModelFamily;
use crate::likelihood::{forward_log_likelihood, mc_log_likelihood, McOptions};
use crate::systems::{HiddenSystem, ParameterBox, ParameterPoint};

pub const DEFAULT_RESOLUTION: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GridOptions {
    /// Used only for families without an exact likelihood. All grid points
    /// share the same seed (common random numbers).
    pub mc: McOptions,
}

/// Normalized log-likelihood `theta -> (1/n) log p_theta(y_0^n)` of fixed
/// data, with `n` replaced by 1 when `n = 0`.
pub struct LikelihoodEvaluator<'a> {
    pub family: &'a dyn ModelFamily,
    pub y: &'a [f64],
    pub mc: McOptions,
}

impl LikelihoodEvaluator<'_> {
    pub fn n(&self) -> usize {
        self.y.len().saturating_sub(1)
    }

    pub fn evaluate(&self, theta: &ParameterPoint) -> Result<f64> {
        let model = self.family.observation(theta)?;
        let result = match self.family.hidden(theta)? {
            HiddenSystem::Markov(m) => forward_log_likelihood(&m, &model, self.y)?,
            hidden @ HiddenSystem::Coded(_) => mc_log_likelihood(&hidden, &model, self.y, self.mc)?,
        };
        Ok(result.normalized(self.n()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub theta: ParameterPoint,
    pub value: f64,
}

/// Normalized log-likelihood on a lexicographically ordered grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLikelihoodSurface {
    pub resolution: Vec<usize>,
    pub parameter_box: ParameterBox,
    pub grid: Vec<SurfacePoint>,
    pub argmax_index: usize,
    pub argmax_point: ParameterPoint,
    pub argmax_value: f64,
    /// Largest change of the surface between the argmax and its grid
    /// neighbours: a reporting proxy for how far the continuum supremum may
    /// sit above the grid maximum.
    pub slack: f64,
    pub n: usize,
}

impl LogLikelihoodSurface {
    /// Grid spacing per coordinate.
    pub fn spacing(&self) -> Vec<f64> {
        self.parameter_box
            .bounds()
            .iter()
            .zip(&self.resolution)
            .map(|(&(lo, hi), &r)| (hi - lo) / (r - 1) as f64)
            .collect()
    }

    fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.resolution.len()];
        for (i, &r) in self.resolution.iter().enumerate().rev() {
            idx[i] = k % r;
            k /= r;
        }
        idx
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.resolution).fold(0, |acc, (&i, &r)| acc * r + i)
    }

    /// Flat indices of the axis neighbours of grid point `k`.
    pub fn neighbours(&self, k: usize) -> Vec<usize> {
        let idx = self.multi_index(k);
        let mut out = Vec::new();
        for d in 0..idx.len() {
            for step in [-1i64, 1] {
                let j = idx[d] as i64 + step;
                if j >= 0 && (j as usize) < self.resolution[d] {
                    let mut nb = idx.clone();
                    nb[d] = j as usize;
                    out.push(self.flat_index(&nb));
                }
            }
        }
        out
    }
}

fn grid_point(bbox: &ParameterBox, resolution: &[usize], mut k: usize) -> ParameterPoint {
    let mut coords = vec![0.0; resolution.len()];
    for (i, &r) in resolution.iter().enumerate().rev() {
        coords[i] = bbox.grid_coordinate(i, k % r, r);
        k /= r;
    }
    ParameterPoint::new(coords)
}

/// Evaluate the normalized log-likelihood at every grid point and return
/// the surface with its argmax. Ties go to the lexicographically smallest
/// grid point; zero-likelihood points rank below every finite value.
pub fn grid_mle(
    family: &dyn ModelFamily,
    y: &[f64],
    resolution: &[usize],
    options: GridOptions,
) -> Result<LogLikelihoodSurface> {
    let bbox = family.parameter_box().clone();
    if resolution.len() != bbox.dim() {
        return Err(invalid(format!(
            "resolution has {} entries for a {}-dimensional box",
            resolution.len(),
            bbox.dim()
        )));
    }
    if bbox.dim() > 3 {
        return Err(invalid("grid search supports at most 3 parameter dimensions"));
    }
    if resolution.iter().any(|&r| r < 2) {
        return Err(invalid("grid resolution must be >= 2 per dimension"));
    }
    let total: usize = resolution.iter().product();
    let evaluator = LikelihoodEvaluator { family, y, mc: options.mc };
    let grid = map_indexed(total, |k| {
        let theta = grid_point(&bbox, resolution, k);
        evaluator.evaluate(&theta).map(|value| SurfacePoint { theta, value })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut best: Option<usize> = None;
    for (k, p) in grid.iter().enumerate() {
        if p.value == f64::NEG_INFINITY || p.value.is_nan() {
            continue;
        }
        if best.is_none_or(|b| p.value > grid[b].value) {
            best = Some(k);
        }
    }
    let argmax_index = best.ok_or(Error::AllDegenerate)?;
    let mut surface = LogLikelihoodSurface {
        resolution: resolution.to_vec(),
        parameter_box: bbox,
        argmax_point: grid[argmax_index].theta.clone(),
        argmax_value: grid[argmax_index].value,
        grid,
        argmax_index,
        slack: 0.0,
        n: evaluator.n(),
    };
    surface.slack = surface
        .neighbours(argmax_index)
        .into_iter()
        .map(|j| surface.argmax_value - surface.grid[j].value)
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max);
    Ok(surface)
}
