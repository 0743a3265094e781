use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A point of the parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterPoint(pub Vec<f64>);

impl ParameterPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn scalar(value: f64) -> Self {
        Self(vec![value])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn distance(&self, other: &ParameterPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl std::ops::Index<usize> for ParameterPoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Compact box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterBox {
    bounds: Vec<(f64, f64)>,
}

impl ParameterBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(invalid("parameter box must have at least one dimension"));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(invalid(format!("box coordinate {i}: need finite lo <= hi, got [{lo}, {hi}]")));
            }
        }
        Ok(Self { bounds })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, p: &ParameterPoint) -> bool {
        p.dim() == self.dim()
            && p.0.iter().zip(&self.bounds).all(|(x, &(lo, hi))| *x >= lo && *x <= hi)
    }

    /// Clamp a point into the box.
    pub fn project(&self, p: &ParameterPoint) -> ParameterPoint {
        ParameterPoint(
            p.0.iter()
                .zip(&self.bounds)
                .map(|(x, &(lo, hi))| x.clamp(lo, hi))
                .collect(),
        )
    }

    /// Coordinate `i` of grid point `k` out of `resolution` evenly spaced
    /// points. The end points are exactly `lo` and `hi`.
    pub fn grid_coordinate(&self, i: usize, k: usize, resolution: usize) -> f64 {
        let (lo, hi) = self.bounds[i];
        if resolution <= 1 {
            return lo;
        }
        if k + 1 == resolution {
            return hi;
        }
        lo + (hi - lo) * k as f64 / (resolution - 1) as f64
    }
}
