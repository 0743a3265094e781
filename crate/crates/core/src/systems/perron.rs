//! Perron eigendata of nonnegative matrices by power iteration.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const PERRON_TOL: f64 = 1e-13;
pub const PERRON_MAX_ITER: usize = 100_000;

/// Perron root and right eigenvector (sup-normalized, strictly positive for
/// primitive input). Starts from the all-ones vector; stops when successive
/// normalized iterates differ by less than `PERRON_TOL` in sup norm.
pub fn perron_right(matrix: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let n = matrix.nrows();
    let mut v = DVector::from_element(n, 1.0);
    let mut next = DVector::zeros(n);
    for _ in 0..PERRON_MAX_ITER {
        matrix.mul_to(&v, &mut next);
        let norm = next.amax();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::EigenFailure(PERRON_MAX_ITER));
        }
        next /= norm;
        let diff = (&next - &v).amax();
        std::mem::swap(&mut v, &mut next);
        if diff < PERRON_TOL {
            matrix.mul_to(&v, &mut next);
            return Ok((next.amax(), v));
        }
    }
    Err(Error::EigenFailure(PERRON_MAX_ITER))
}

/// Left Perron vector, i.e. the right vector of the transpose.
pub fn perron_left(matrix: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    perron_right(&matrix.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_root() {
        // lambda^2 = lambda + 1
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let (lambda, v) = perron_right(&m).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((lambda - golden).abs() < 1e-12);
        assert!((v[1] / v[0] - 1.0 / golden).abs() < 1e-12);
    }

    #[test]
    fn stochastic_matrix_has_unit_root() {
        let m = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.4, 0.6]);
        let (lambda, v) = perron_right(&m).unwrap();
        assert!((lambda - 1.0).abs() < 1e-12);
        assert!((v[0] - v[1]).abs() < 1e-12);
    }

    #[test]
    fn periodic_matrix_fails() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        // all-ones is already an eigenvector here, so this converges;
        // a non-symmetric start would oscillate.
        assert!(perron_right(&m).is_ok());
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 1.0, 0.0]);
        assert!(matches!(perron_right(&m), Err(Error::EigenFailure(_))));
    }
}
