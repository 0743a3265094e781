use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Symbol set `{0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(invalid(format!("alphabet size must be >= 2, got {size}")));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// Binary transition matrix of a shift of finite type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionStructure {
    alphabet: Alphabet,
    allowed: Vec<bool>,
}

impl TransitionStructure {
    /// Build from a 0/1 matrix. Every row and every column needs at least one
    /// allowed transition.
    pub fn new(allowed: Vec<Vec<bool>>) -> Result<Self> {
        let size = allowed.len();
        let alphabet = Alphabet::new(size)?;
        if allowed.iter().any(|row| row.len() != size) {
            return Err(invalid("allowed matrix must be square"));
        }
        let flat: Vec<bool> = allowed.into_iter().flatten().collect();
        let s = Self { alphabet, allowed: flat };
        for a in 0..size {
            if !(0..size).any(|b| s.allowed(a, b)) {
                return Err(invalid(format!("row {a} of the allowed matrix is empty")));
            }
            if !(0..size).any(|b| s.allowed(b, a)) {
                return Err(invalid(format!("column {a} of the allowed matrix is empty")));
            }
        }
        Ok(s)
    }

    /// Full shift on `size` symbols.
    pub fn full(size: usize) -> Result<Self> {
        Self::new(vec![vec![true; size]; size])
    }

    pub fn from_integers(rows: &[Vec<u8>]) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let mut r = Vec::with_capacity(row.len());
            for &v in row {
                match v {
                    0 => r.push(false),
                    1 => r.push(true),
                    other => return Err(invalid(format!("allowed matrix entries must be 0 or 1, got {other}"))),
                }
            }
            out.push(r);
        }
        Self::new(out)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.size()
    }

    #[inline]
    pub fn allowed(&self, a: usize, b: usize) -> bool {
        self.allowed[a * self.size() + b]
    }

    /// Some power `M^k`, `k <= size^2`, has every entry positive.
    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }

    /// Smallest `k <= size^2` with `M^k > 0`, if any.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        let n = self.size();
        let mut power = self.allowed.clone();
        for k in 1..=n * n {
            if power.iter().all(|&x| x) {
                return Some(k);
            }
            let mut next = vec![false; n * n];
            for i in 0..n {
                for j in 0..n {
                    next[i * n + j] = (0..n).any(|m| power[i * n + m] && self.allowed(m, j));
                }
            }
            power = next;
        }
        None
    }

    /// Irreducibility: every symbol reaches every other.
    pub fn is_irreducible(&self) -> bool {
        let n = self.size();
        (0..n).all(|start| {
            let mut seen = vec![false; n];
            let mut stack = vec![start];
            while let Some(a) = stack.pop() {
                for b in 0..n {
                    if self.allowed(a, b) && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            seen.iter().all(|&s| s)
        })
    }
}
