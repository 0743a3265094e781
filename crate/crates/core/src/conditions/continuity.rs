use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exec::map_indexed;
use crate::family::ModelFamily;
use crate::inference::LikelihoodEvaluator;
use crate::likelihood::McOptions;
use crate::systems::ParameterPoint;

/// Fine-to-coarse jump ratio above which a discontinuity is suspected. A
/// Lipschitz surface gives about 0.5.
pub const JUMP_RATIO_FLAG: f64 = 0.6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub coarse_resolution: usize,
    pub fine_resolution: usize,
    /// Largest change of the normalized log-likelihood between adjacent
    /// coarse grid points.
    pub coarse_max_jump: f64,
    pub fine_max_jump: f64,
    /// Midpoint of the largest fine jump.
    pub fine_max_jump_at: ParameterPoint,
    /// `fine_max_jump / coarse_max_jump`, or 0 when the surface is flat.
    pub ratio: f64,
    pub suspected_discontinuity: bool,
}

struct Scan {
    max_jump: f64,
    at: ParameterPoint,
}

fn jump(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

fn scan(eval: &LikelihoodEvaluator<'_>, resolution: usize) -> Result<Scan> {
    let bx = eval.family.parameter_box();
    let d = bx.dim();
    let total = resolution.pow(d as u32);
    let point = |k: usize| -> ParameterPoint {
        let mut coords = vec![0.0; d];
        let mut rem = k;
        for i in (0..d).rev() {
            coords[i] = bx.grid_coordinate(i, rem % resolution, resolution);
            rem /= resolution;
        }
        ParameterPoint::new(coords)
    };
    let values = map_indexed(total, |k| eval.evaluate(&point(k)))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let mut best = Scan {
        max_jump: 0.0,
        at: point(0),
    };
    for k in 0..total {
        let mut stride = 1;
        for i in (0..d).rev() {
            let index = (k / stride) % resolution;
            if index + 1 < resolution {
                let j = jump(values[k], values[k + stride]);
                if j > best.max_jump || j.is_nan() {
                    let (a, b) = (point(k), point(k + stride));
                    let mid = a.coords().iter().zip(b.coords()).map(|(x, y)| 0.5 * (x + y)).collect();
                    best = Scan {
                        max_jump: if j.is_nan() { f64::INFINITY } else { j },
                        at: ParameterPoint::new(mid),
                    };
                }
            }
            let _ = i;
            stride *= resolution;
        }
    }
    Ok(best)
}

/// Largest adjacent-point jump of `theta -> (1/n) log p_theta(y)` on a coarse
/// grid and on the grid with halved spacing (`2r - 1` points per axis).
pub fn continuity_scan(family: &dyn ModelFamily, y: &[f64], resolution: usize, mc: McOptions) -> Result<ContinuityReport> {
    let d = family.parameter_box().dim();
    if d == 0 || d > 2 {
        return Err(invalid("continuity scan supports 1-d and 2-d boxes"));
    }
    if resolution < 2 {
        return Err(invalid("continuity scan needs resolution >= 2"));
    }
    let eval = LikelihoodEvaluator { family, y, mc };
    let fine_resolution = 2 * resolution - 1;
    let coarse = scan(&eval, resolution)?;
    let fine = scan(&eval, fine_resolution)?;
    let ratio = if coarse.max_jump == 0.0 {
        0.0
    } else {
        fine.max_jump / coarse.max_jump
    };
    Ok(ContinuityReport {
        coarse_resolution: resolution,
        fine_resolution,
        coarse_max_jump: coarse.max_jump,
        fine_max_jump: fine.max_jump,
        fine_max_jump_at: fine.at,
        ratio,
        suspected_discontinuity: ratio > JUMP_RATIO_FLAG || !ratio.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{ConfiguredFamily, HiddenSpec, ObservationSpec, Scalar};
    use crate::simulate::simulate;
    use crate::systems::{ParameterBox, TabulatedPotential, TransitionStructure};

    fn gaussian(std: Scalar) -> ObservationSpec {
        ObservationSpec::Gaussian {
            means: vec![0.0, 1.0],
            mean_scale: None,
            std,
        }
    }

    fn data(fam: &ConfiguredFamily, theta: f64, n: usize) -> Vec<f64> {
        let t = ParameterPoint::scalar(theta);
        simulate(&fam.hidden(&t).unwrap(), &fam.observation(&t).unwrap(), n, 9)
    }

    #[test]
    fn theta_independent_model_has_no_jumps() {
        let fam = ConfiguredFamily::new(
            HiddenSpec::Markov {
                matrix: vec![vec![0.7, 0.3], vec![0.3, 0.7]],
            },
            gaussian(Scalar::Fixed(0.5)),
            ParameterBox::interval(0.0, 1.0).unwrap(),
        )
        .unwrap();
        let y = data(&fam, 0.5, 200);
        let r = continuity_scan(&fam, &y, 11, McOptions::default()).unwrap();
        assert_eq!(r.coarse_max_jump, 0.0);
        assert_eq!(r.fine_max_jump, 0.0);
        assert!(!r.suspected_discontinuity);
    }

    #[test]
    fn smooth_family_halves() {
        let fam = ConfiguredFamily::new(
            HiddenSpec::Flip2,
            gaussian(Scalar::Fixed(0.5)),
            ParameterBox::interval(0.1, 0.9).unwrap(),
        )
        .unwrap();
        let y = data(&fam, 0.3, 1000);
        let r = continuity_scan(&fam, &y, 21, McOptions::default()).unwrap();
        assert!((r.ratio - 0.5).abs() <= 0.1, "ratio {}", r.ratio);
        assert!(!r.suspected_discontinuity);
    }

    #[test]
    fn step_potential_is_flagged() {
        let structure = TransitionStructure::full(2).unwrap();
        let low = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        let high = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let potential = TabulatedPotential {
            thetas: vec![0.0, 0.5, 0.5 + 1e-9, 1.0],
            tables: vec![low.clone(), low, high.clone(), high],
        };
        let fam = ConfiguredFamily::new(
            HiddenSpec::PotentialTable { structure, potential },
            gaussian(Scalar::Fixed(0.5)),
            ParameterBox::interval(0.0, 1.0).unwrap(),
        )
        .unwrap();
        let y = data(&fam, 0.25, 1000);
        let r = continuity_scan(&fam, &y, 10, McOptions::default()).unwrap();
        assert!(r.suspected_discontinuity, "ratio {}", r.ratio);
        assert!((r.fine_max_jump_at[0] - 0.5).abs() < 0.06);
    }

    #[test]
    fn two_dimensional_scan() {
        let fam = ConfiguredFamily::new(
            HiddenSpec::Flip2,
            gaussian(Scalar::Theta(1)),
            ParameterBox::new(vec![(0.1, 0.9), (0.3, 0.8)]).unwrap(),
        )
        .unwrap();
        let t = ParameterPoint::new(vec![0.3, 0.5]);
        let y = simulate(&fam.hidden(&t).unwrap(), &fam.observation(&t).unwrap(), 500, 2);
        let r = continuity_scan(&fam, &y, 9, McOptions::default()).unwrap();
        assert!(r.ratio > 0.3 && r.ratio < JUMP_RATIO_FLAG);
        let cube = ConfiguredFamily::new(
            HiddenSpec::Flip2,
            gaussian(Scalar::Theta(1)),
            ParameterBox::new(vec![(0.1, 0.9), (0.3, 0.8), (0.0, 1.0)]).unwrap(),
        )
        .unwrap();
        assert!(continuity_scan(&cube, &y, 9, McOptions::default()).is_err());
    }
}
