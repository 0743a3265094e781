use serde::{Deserialize, Serialize};

use super::ParameterPoint;

/// Two-coordinate potential `phi_theta(a, b)`.
///
/// Continuity in theta is not checked here; `conditions::continuity_scan`
/// probes it numerically.
pub trait PotentialFamily: Send + Sync {
    fn value(&self, theta: &ParameterPoint, a: usize, b: usize) -> f64;
}

/// Wraps a closure as a potential.
pub struct PotentialFn<F>(pub F);

impl<F> PotentialFamily for PotentialFn<F>
where
    F: Fn(&ParameterPoint, usize, usize) -> f64 + Send + Sync,
{
    fn value(&self, theta: &ParameterPoint, a: usize, b: usize) -> f64 {
        (self.0)(theta, a, b)
    }
}

/// `phi_theta(a, b) = theta[0] * f(a, b)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearPotential {
    pub table: Vec<Vec<f64>>,
}

impl PotentialFamily for LinearPotential {
    fn value(&self, theta: &ParameterPoint, a: usize, b: usize) -> f64 {
        theta[0] * self.table[a][b]
    }
}

/// Literal tables at a list of theta values, linearly interpolated in
/// `theta[0]` and held constant outside the tabulated range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPotential {
    pub thetas: Vec<f64>,
    pub tables: Vec<Vec<Vec<f64>>>,
}

impl PotentialFamily for TabulatedPotential {
    fn value(&self, theta: &ParameterPoint, a: usize, b: usize) -> f64 {
        let t = theta[0];
        let ts = &self.thetas;
        if t <= ts[0] {
            return self.tables[0][a][b];
        }
        let last = ts.len() - 1;
        if t >= ts[last] {
            return self.tables[last][a][b];
        }
        let k = ts.partition_point(|&x| x <= t) - 1;
        let w = (t - ts[k]) / (ts[k + 1] - ts[k]);
        (1.0 - w) * self.tables[k][a][b] + w * self.tables[k + 1][a][b]
    }
}

/// `phi(a, b) = log Q(a, b)` for a fixed row-stochastic `Q`.
#[derive(Debug, Clone)]
pub struct LogStochastic {
    pub q: Vec<Vec<f64>>,
}

impl PotentialFamily for LogStochastic {
    fn value(&self, _theta: &ParameterPoint, a: usize, b: usize) -> f64 {
        self.q[a][b].ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_interpolates() {
        let p = TabulatedPotential {
            thetas: vec![0.0, 1.0],
            tables: vec![vec![vec![0.0; 2]; 2], vec![vec![2.0; 2]; 2]],
        };
        assert_eq!(p.value(&ParameterPoint::scalar(0.25), 0, 1), 0.5);
        assert_eq!(p.value(&ParameterPoint::scalar(-1.0), 0, 1), 0.0);
        assert_eq!(p.value(&ParameterPoint::scalar(3.0), 1, 1), 2.0);
    }
}
