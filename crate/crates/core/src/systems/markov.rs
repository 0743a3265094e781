use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use serde::{Serialize, Serializer};

use super::perron::{perron_left, perron_right};
use super::{ParameterPoint, PotentialFamily, TransitionStructure};
use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// Shift of finite type with a one-step Markov equilibrium measure.
#[derive(Debug, Clone, Serialize)]
pub struct MarkovSystem {
    structure: TransitionStructure,
    #[serde(serialize_with = "serialize_matrix")]
    p: DMatrix<f64>,
    pi: Vec<f64>,
    perron_root: f64,
}

fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

impl MarkovSystem {
    /// Equilibrium state of a two-coordinate potential:
    /// `B(a,b) = M(a,b) exp(phi(a,b))`, `P(a,b) = B(a,b) r(b) / (lambda r(a))`,
    /// `pi(a) = l(a) r(a) / sum_c l(c) r(c)`.
    pub fn from_potential(
        structure: &TransitionStructure,
        potential: &dyn PotentialFamily,
        theta: &ParameterPoint,
    ) -> Result<Self> {
        if !structure.is_primitive() {
            return Err(Error::NonPrimitive);
        }
        let n = structure.size();
        let mut b = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if structure.allowed(i, j) {
                    let phi = potential.value(theta, i, j);
                    if !phi.is_finite() {
                        return Err(invalid(format!("potential is not finite on allowed pair ({i}, {j})")));
                    }
                    b[(i, j)] = phi.exp();
                }
            }
        }
        let (lambda, r) = perron_right(&b)?;
        let (_, l) = perron_left(&b)?;
        let mut p = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] = b[(i, j)] * r[j] / (lambda * r[i]);
            }
            let row_sum: f64 = p.row(i).sum();
            for j in 0..n {
                p[(i, j)] /= row_sum;
            }
        }
        let weights: Vec<f64> = (0..n).map(|i| l[i] * r[i]).collect();
        let total: f64 = weights.iter().sum();
        let pi = weights.iter().map(|w| w / total).collect();
        Ok(Self {
            structure: structure.clone(),
            p,
            pi,
            perron_root: lambda,
        })
    }

    /// Markov measure of a given row-stochastic matrix. The allowed structure
    /// is the support of `p`; primitivity is not required, so periodic chains
    /// can be represented. The stationary vector is the solution of
    /// `pi (P - I) = 0`, `sum pi = 1`, which is unique for irreducible `P`.
    pub fn from_stochastic(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("transition matrix must be square"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                return Err(invalid(format!("row {i} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(invalid(format!("row {i} sums to {s}, expected 1")));
            }
        }
        let allowed = rows.iter().map(|r| r.iter().map(|&x| x > 0.0).collect()).collect();
        let structure = TransitionStructure::new(allowed)?;
        if !structure.is_irreducible() {
            return Err(invalid("transition matrix is reducible; stationary vector is not unique"));
        }
        let p = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let pi = stationary_vector(&p)?;
        Ok(Self {
            structure,
            p,
            pi,
            perron_root: 1.0,
        })
    }

    pub fn structure(&self) -> &TransitionStructure {
        &self.structure
    }

    pub fn size(&self) -> usize {
        self.structure.size()
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.p
    }

    #[inline]
    pub fn p(&self, a: usize, b: usize) -> f64 {
        self.p[(a, b)]
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn perron_root(&self) -> f64 {
        self.perron_root
    }

    pub fn is_primitive(&self) -> bool {
        self.structure.is_primitive()
    }

    /// `P^k`.
    pub fn transition_power(&self, k: usize) -> DMatrix<f64> {
        let n = self.size();
        let mut out = DMatrix::identity(n, n);
        let mut base = self.p.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        out
    }

    /// `|pi P - pi|_inf`.
    pub fn stationarity_residual(&self) -> f64 {
        let pi = DVector::from_column_slice(&self.pi);
        (self.p.tr_mul(&pi) - pi).amax()
    }

    /// Second-largest eigenvalue modulus of `P`.
    pub fn second_eigenvalue_modulus(&self) -> f64 {
        let mut moduli: Vec<f64> = self.p.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        moduli.get(1).copied().unwrap_or(0.0)
    }

    /// `mu([a_0 .. a_k]) = pi(a_0) prod P(a_i, a_{i+1})`.
    pub fn cylinder_measure(&self, word: &[usize]) -> f64 {
        match word.split_first() {
            None => 1.0,
            Some((&first, _)) => {
                self.pi[first] * word.windows(2).map(|w| self.p(w[0], w[1])).product::<f64>()
            }
        }
    }

    /// Is every row of `P` equal to `pi` (an i.i.d. measure)?
    pub fn is_iid(&self, tol: f64) -> bool {
        let n = self.size();
        (0..n).all(|a| (0..n).all(|b| (self.p(a, b) - self.pi[b]).abs() <= tol))
    }

    pub fn sample_initial(&self, rng: &mut Rng) -> usize {
        sample_index(&self.pi, rng.random::<f64>())
    }

    pub fn sample_next(&self, a: usize, rng: &mut Rng) -> usize {
        let u = rng.random::<f64>();
        let n = self.size();
        let mut acc = 0.0;
        for b in 0..n {
            acc += self.p(a, b);
            if u < acc {
                return b;
            }
        }
        // rounding: last allowed successor
        (0..n).rev().find(|&b| self.p(a, b) > 0.0).unwrap_or(n - 1)
    }

    /// Trajectory `x_0 .. x_n` with `x_0 ~ pi`, `x_{k+1} ~ P(x_k, .)`.
    pub fn sample_trajectory(&self, n: usize, seed: u64) -> Vec<usize> {
        let mut rng = rng_from_seed(seed);
        self.sample_trajectory_with(n, &mut rng)
    }

    pub fn sample_trajectory_with(&self, n: usize, rng: &mut Rng) -> Vec<usize> {
        let mut out = Vec::with_capacity(n + 1);
        let mut x = self.sample_initial(rng);
        out.push(x);
        for _ in 0..n {
            x = self.sample_next(x, rng);
            out.push(x);
        }
        out
    }
}

fn sample_index(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

fn stationary_vector(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| invalid("singular system for the stationary vector"))?;
    let mut pi: Vec<f64> = sol.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    Ok(pi)
}
