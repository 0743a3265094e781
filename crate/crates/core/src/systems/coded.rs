//! Interval maps coded by a shift.
//!
//! The doubling map `x -> 2x mod 1` with Lebesgue measure is measurably
//! conjugate to the full 2-shift with the uniform Bernoulli measure through
//! binary expansion, so observed doubling-map systems and observed Bernoulli
//! shifts share their likelihoods.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::MarkovSystem;
use crate::error::{invalid, Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodedMapKind {
    Doubling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodedMap {
    pub kind: CodedMapKind,
    coding_depth: usize,
}

/// Binary digits available in an `f64` drawn uniformly from `[0, 1)`.
pub const F64_ORBIT_DIGITS: usize = 53;

impl CodedMap {
    pub fn doubling(coding_depth: usize) -> Result<Self> {
        if coding_depth == 0 {
            return Err(invalid("coding depth must be >= 1"));
        }
        Ok(Self {
            kind: CodedMapKind::Doubling,
            coding_depth,
        })
    }

    pub fn coding_depth(&self) -> usize {
        self.coding_depth
    }

    /// `T(x) = 2x mod 1`. Exact in floating point.
    pub fn apply(&self, x: f64) -> f64 {
        let y = 2.0 * x;
        if y >= 1.0 {
            y - 1.0
        } else {
            y
        }
    }

    /// Partition symbol of `x`: 0 on `[0, 1/2)`, 1 on `[1/2, 1)`.
    pub fn symbol(&self, x: f64) -> usize {
        usize::from(x >= 0.5)
    }

    /// First `coding_depth` symbols of the itinerary of `x`.
    pub fn encode(&self, x: f64) -> Result<Vec<u8>> {
        self.encode_prefix(x, self.coding_depth)
    }

    /// First `len` symbols; fails if `len` exceeds the coding depth.
    pub fn encode_prefix(&self, x: f64, len: usize) -> Result<Vec<u8>> {
        if len > self.coding_depth {
            return Err(Error::DepthExceeded {
                requested: len,
                depth: self.coding_depth,
            });
        }
        if !(0.0..1.0).contains(&x) {
            return Err(invalid(format!("point {x} is outside [0, 1)")));
        }
        let mut out = Vec::with_capacity(len);
        let mut y = x;
        for _ in 0..len {
            out.push(self.symbol(y) as u8);
            y = self.apply(y);
        }
        Ok(out)
    }

    /// Point whose expansion starts with the first `coding_depth` symbols.
    pub fn decode(&self, symbols: &[u8]) -> Result<f64> {
        if symbols.len() < self.coding_depth {
            return Err(Error::DepthExceeded {
                requested: self.coding_depth,
                depth: symbols.len(),
            });
        }
        let mut x = 0.0;
        for &s in symbols[..self.coding_depth].iter().rev() {
            if s > 1 {
                return Err(invalid(format!("symbol {s} is not binary")));
            }
            x = (x + f64::from(s)) / 2.0;
        }
        Ok(x)
    }

    /// Symbolic image of the invariant measure: the uniform Bernoulli
    /// measure on the full 2-shift.
    pub fn symbolic_system(&self) -> MarkovSystem {
        MarkovSystem::from_stochastic(&[vec![0.5, 0.5], vec![0.5, 0.5]])
            .expect("uniform 2x2 matrix is a valid chain")
    }

    /// Symbols of the orbit `x, T x, .., T^n x` for `x` uniform on `[0, 1)`.
    ///
    /// The digits are drawn directly, one fair bit per step, so `n` is not
    /// limited by floating-point precision.
    pub fn sample_orbit_symbols(&self, n: usize, rng: &mut Rng) -> Vec<usize> {
        (0..=n).map(|_| usize::from(rng.random::<bool>())).collect()
    }

    /// Orbit symbols `x, T x, .., T^n x` of a uniform point held to
    /// `coding_depth` binary digits. Up to 53 symbols the map is iterated on
    /// an `f64` draw; longer orbits read the digits of the point directly,
    /// which is exact because the map shifts the binary expansion.
    pub fn sample_orbit(&self, n: usize, rng: &mut Rng) -> Result<Vec<usize>> {
        if n + 1 > self.coding_depth {
            return Err(Error::DepthExceeded {
                requested: n + 1,
                depth: self.coding_depth,
            });
        }
        if n < F64_ORBIT_DIGITS {
            let x: f64 = rng.random();
            self.orbit_symbols(x, n)
        } else {
            Ok(self.sample_orbit_symbols(n, rng))
        }
    }

    /// Orbit symbols of a floating-point starting point by iterating the map.
    /// Valid while `n + 1` stays within the coding depth and the available
    /// binary digits of `x`.
    pub fn orbit_symbols(&self, x: f64, n: usize) -> Result<Vec<usize>> {
        let limit = self.coding_depth.min(F64_ORBIT_DIGITS);
        if n + 1 > limit {
            return Err(Error::DepthExceeded {
                requested: n + 1,
                depth: limit,
            });
        }
        let mut out = Vec::with_capacity(n + 1);
        let mut y = x;
        for _ in 0..=n {
            out.push(self.symbol(y));
            y = self.apply(y);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn zero_is_fixed() {
        let m = CodedMap::doubling(16).unwrap();
        assert_eq!(m.encode(0.0).unwrap(), vec![0; 16]);
    }

    #[test]
    fn one_third_alternates() {
        let m = CodedMap::doubling(40).unwrap();
        let code = m.encode(1.0 / 3.0).unwrap();
        for (k, &s) in code.iter().enumerate() {
            assert_eq!(s, (k % 2) as u8, "digit {k}");
        }
    }

    #[test]
    fn round_trip_within_dyadic_bound() {
        let m = CodedMap::doubling(40).unwrap();
        let mut rng = rng_from_seed(1);
        for _ in 0..1000 {
            let x: f64 = rng.random();
            let back = m.decode(&m.encode(x).unwrap()).unwrap();
            assert!((back - x).abs() <= 2f64.powi(-40));
            assert!(back <= x);
        }
    }

    #[test]
    fn depth_exceeded() {
        let m = CodedMap::doubling(8).unwrap();
        assert!(matches!(m.encode_prefix(0.3, 9), Err(Error::DepthExceeded { .. })));
        assert!(matches!(m.decode(&[0, 1]), Err(Error::DepthExceeded { .. })));
        assert!(CodedMap::doubling(0).is_err());
        assert!(m.orbit_symbols(0.3, 8).is_err());
    }

    #[test]
    fn encode_intertwines_map_and_shift() {
        let m = CodedMap::doubling(30).unwrap();
        let mut rng = rng_from_seed(2);
        for _ in 0..500 {
            // dyadic inputs with 30 digits are exactly representable
            let x = (rng.random::<u32>() >> 2) as f64 / 2f64.powi(30);
            let a = m.encode(x).unwrap();
            let b = m.encode(m.apply(x)).unwrap();
            assert_eq!(&a[1..], &b[..29]);
        }
    }
}
