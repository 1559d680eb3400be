use std::collections::BTreeMap;

use super::{BinaryQuadraticForm, QuboError};
use crate::scalar::Scalar;

/// `offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j` over `s ∈ {-1,+1}^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingForm<T> {
    h: Vec<T>,
    j: BTreeMap<(usize, usize), T>,
    offset: T,
}

impl<T: Scalar> IsingForm<T> {
    pub fn fields(&self) -> &[T] {
        &self.h
    }

    pub fn couplings(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        self.j.iter().map(|(&ij, &c)| (ij, c))
    }

    pub fn coupling(&self, a: usize, b: usize) -> T {
        self.j.get(&(a.min(b), a.max(b))).copied().unwrap_or_else(T::zero)
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    pub fn energy(&self, spins: &[i8]) -> T {
        assert_eq!(spins.len(), self.h.len(), "spin count mismatch");
        let s = |i: usize| T::from_int(spins[i] as i64);
        let mut e = self.offset;
        for (i, &h) in self.h.iter().enumerate() {
            e += h * s(i);
        }
        for (&(a, b), &c) in &self.j {
            e += c * s(a) * s(b);
        }
        e
    }

    /// Energy at the spins `s_i = 2 x_i - 1` of a bit assignment.
    pub fn energy_of_bits(&self, bits: &[bool]) -> T {
        let spins: Vec<i8> = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
        self.energy(&spins)
    }

    /// `max(max|h|/min|h|, max|J|/min|J|)` with minima over nonzero magnitudes.
    pub fn max_coefficient_ratio(&self) -> Result<T, QuboError> {
        fn ratio<T: Scalar>(values: impl Iterator<Item = T>) -> Option<T> {
            let mags: Vec<T> = values.map(T::abs).filter(|m| !m.is_zero()).collect();
            let max = mags.iter().copied().reduce(T::max)?;
            let min = mags.iter().copied().reduce(T::min)?;
            Some(max / min)
        }
        match (ratio(self.h.iter().copied()), ratio(self.j.values().copied())) {
            (Some(a), Some(b)) => Ok(a.max(b)),
            (Some(a), None) | (None, Some(a)) => Ok(a),
            (None, None) => Err(QuboError::AllZero),
        }
    }
}

/// Rewrites `q` in spin variables `x = (s + 1) / 2`; the energy is preserved
/// exactly, with constants folded into the offset.
pub fn to_ising<T: Scalar>(q: &BinaryQuadraticForm<T>) -> IsingForm<T> {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let mut h = vec![T::zero(); q.num_variables()];
    let mut j = BTreeMap::new();
    let mut offset = q.offset();
    for (i, a) in q.linear() {
        h[i] += a * half;
        offset += a * half;
    }
    for ((a, b), c) in q.quadratic() {
        let w = c * quarter;
        j.insert((a, b), w);
        h[a] += w;
        h[b] += w;
        offset += w;
    }
    IsingForm { h, j, offset }
}
