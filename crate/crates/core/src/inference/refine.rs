use serde::{Deserialize, Serialize};

use super::LogLikelihoodSurface;
use crate::optim::golden_section_max;
use crate::systems::ParameterPoint;

pub const DEFAULT_REFINE_ITERATIONS: usize = 40;
const COORDINATE_CYCLES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedEstimate {
    pub theta: ParameterPoint,
    /// Normalized log-likelihood at `theta`.
    pub value: f64,
    pub grid_value: f64,
    /// Some coordinate of `theta` sits on the box boundary.
    pub boundary_hit: bool,
    pub slack: f64,
}

/// Polish the grid argmax with golden-section search inside the grid cell
/// around it (coordinate-wise cycles when `d > 1`). The result is never
/// worse than the grid argmax; evaluation failures count as `-inf`.
pub fn refine_mle<F>(surface: &LogLikelihoodSurface, evaluator: F, iterations: usize) -> RefinedEstimate
where
    F: Fn(&ParameterPoint) -> f64,
{
    let bbox = &surface.parameter_box;
    let spacing = surface.spacing();
    let score = |p: &ParameterPoint| {
        let v = evaluator(p);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let mut best = surface.argmax_point.clone();
    let mut best_value = surface.argmax_value;
    let cycles = if bbox.dim() == 1 { 1 } else { COORDINATE_CYCLES };
    for _ in 0..cycles {
        for i in 0..bbox.dim() {
            let (lo_box, hi_box) = bbox.bounds()[i];
            let lo = (best[i] - spacing[i]).max(lo_box);
            let hi = (best[i] + spacing[i]).min(hi_box);
            if hi <= lo {
                continue;
            }
            let base = best.clone();
            let along = |x: f64| {
                let mut p = base.clone();
                p.0[i] = x;
                p
            };
            let g = golden_section_max(|x| score(&along(x)), lo, hi, 0.0, iterations);
            // End points are candidates too, so a maximum on the box
            // boundary is reached exactly.
            for (x, v) in [(g.x, g.value), (lo, score(&along(lo))), (hi, score(&along(hi)))] {
                if v > best_value {
                    best_value = v;
                    best = along(x);
                }
            }
        }
    }
    let boundary_hit = best
        .coords()
        .iter()
        .zip(bbox.bounds())
        .any(|(&x, &(lo, hi))| x == lo || x == hi);
    RefinedEstimate {
        theta: best,
        value: best_value,
        grid_value: surface.argmax_value,
        boundary_hit,
        slack: surface.slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::ParameterBox;
    use crate::inference::SurfacePoint;

    fn surface_from<F: Fn(&ParameterPoint) -> f64>(bbox: ParameterBox, res: usize, f: F) -> LogLikelihoodSurface {
        let grid: Vec<SurfacePoint> = (0..res)
            .map(|k| {
                let theta = ParameterPoint::scalar(bbox.grid_coordinate(0, k, res));
                let value = f(&theta);
                SurfacePoint { theta, value }
            })
            .collect();
        let mut argmax_index = 0;
        for (k, p) in grid.iter().enumerate() {
            if p.value > grid[argmax_index].value {
                argmax_index = k;
            }
        }
        LogLikelihoodSurface {
            resolution: vec![res],
            parameter_box: bbox,
            argmax_point: grid[argmax_index].theta.clone(),
            argmax_value: grid[argmax_index].value,
            grid,
            argmax_index,
            slack: 0.0,
            n: 1,
        }
    }

    #[test]
    fn quadratic_vertex_recovered() {
        // vertex of -(t - 0.4137)^2 is at 0.4137
        let f = |p: &ParameterPoint| -(p[0] - 0.4137).powi(2);
        let s = surface_from(ParameterBox::interval(0.0, 1.0).unwrap(), 11, f);
        let r = refine_mle(&s, f, 40);
        assert!((r.theta[0] - 0.4137).abs() < 1e-6);
        assert!(r.value >= s.argmax_value);
        assert!(!r.boundary_hit);
    }

    #[test]
    fn two_dimensional_quadratic() {
        let bbox = ParameterBox::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let f = |p: &ParameterPoint| -(p[0] - 0.33).powi(2) - 2.0 * (p[1] - 0.71).powi(2) - 0.5 * (p[0] - 0.33) * (p[1] - 0.71);
        let mut s = surface_from(ParameterBox::interval(0.0, 1.0).unwrap(), 11, |_| 0.0);
        s.parameter_box = bbox;
        s.resolution = vec![11, 11];
        s.argmax_point = ParameterPoint::new(vec![0.3, 0.7]);
        s.argmax_value = f(&s.argmax_point);
        let r = refine_mle(&s, f, 40);
        assert!((r.theta[0] - 0.33).abs() < 1e-4 && (r.theta[1] - 0.71).abs() < 1e-4, "{:?}", r.theta);
    }

    #[test]
    fn flat_region_unchanged() {
        let f = |_: &ParameterPoint| -1.25;
        let s = surface_from(ParameterBox::interval(0.0, 1.0).unwrap(), 5, f);
        let r = refine_mle(&s, f, 40);
        assert_eq!(r.theta, s.argmax_point);
        assert_eq!(r.value, -1.25);
    }

    #[test]
    fn boundary_maximum_is_flagged() {
        let f = |p: &ParameterPoint| p[0];
        let s = surface_from(ParameterBox::interval(0.2, 0.8).unwrap(), 7, f);
        let r = refine_mle(&s, f, 40);
        assert_eq!(r.theta[0], 0.8);
        assert!(r.boundary_hit);
    }

    #[test]
    fn never_worse_than_grid() {
        // evaluator disagrees with the stored surface everywhere off-grid
        let s = surface_from(ParameterBox::interval(0.0, 1.0).unwrap(), 5, |p| -(p[0] - 0.5).powi(2));
        let r = refine_mle(&s, |_| f64::NAN, 40);
        assert_eq!(r.theta, s.argmax_point);
        assert!(r.value >= s.argmax_value - 1e-12);
    }
}
