use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::QuboError;
use crate::scalar::Scalar;

/// Meaning of one binary variable.
///
/// Flight and conflict indices are local to the compiled [`Instance`](crate::graph::Instance).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VariableKey {
    /// One-hot bit: departure delay of `flight` is level `level`.
    DepartureDelay { flight: usize, level: usize },
    /// One-hot bit: spatial transformation `option` of `flight`.
    Transform { flight: usize, option: usize },
    /// `flight` takes the maneuver at `conflict`.
    Maneuver { conflict: usize, flight: usize },
    /// Product of the delay bits `(flight, level)` of two flights.
    PairDelay { first: (usize, usize), second: (usize, usize) },
    /// Product of the transformation bits `(flight, option)` of two flights.
    PairTransform { first: (usize, usize), second: (usize, usize) },
    /// One-hot bit: accumulated delay difference at `conflict` equals `value`.
    DelayDiff { conflict: usize, value: i64 },
    /// One-hot bit: accumulated delay of `flight` at `conflict` equals `value`.
    AccumDelay { flight: usize, conflict: usize, value: i64 },
    /// At least one flight maneuvers at `conflict`.
    Ancilla { conflict: usize },
    /// Variable without model meaning, e.g. from an imported file.
    Anonymous { index: usize },
}

/// `offset + Σ linear_i x_i + Σ_{i<j} quadratic_ij x_i x_j` over `x ∈ {0,1}^n`.
///
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryQuadraticForm<T> {
    keys: Vec<VariableKey>,
    index: HashMap<VariableKey, usize>,
    linear: BTreeMap<usize, T>,
    quadratic: BTreeMap<(usize, usize), T>,
    offset: T,
}

impl<T: Scalar> Default for BinaryQuadraticForm<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> BinaryQuadraticForm<T> {
    pub fn new() -> Self {
        Self {
            keys: Vec::new(),
            index: HashMap::new(),
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: T::zero(),
        }
    }

    /// A form with `n` anonymous variables and no terms.
    pub fn with_anonymous(n: usize) -> Self {
        let mut form = Self::new();
        for index in 0..n {
            form.variable(VariableKey::Anonymous { index });
        }
        form
    }

    /// Index of `key`, allocating the next index on first use.
    pub fn variable(&mut self, key: VariableKey) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.keys.len();
        self.index.insert(key.clone(), i);
        self.keys.push(key);
        i
    }

    pub fn index_of(&self, key: &VariableKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn key(&self, i: usize) -> &VariableKey {
        &self.keys[i]
    }

    pub fn keys(&self) -> &[VariableKey] {
        &self.keys
    }

    pub fn num_variables(&self) -> usize {
        self.keys.len()
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn linear(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.linear.iter().map(|(&i, &c)| (i, c))
    }

    pub fn quadratic(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        self.quadratic.iter().map(|(&ij, &c)| (ij, c))
    }

    pub fn linear_coefficient(&self, i: usize) -> T {
        self.linear.get(&i).copied().unwrap_or_else(T::zero)
    }

    pub fn quadratic_coefficient(&self, i: usize, j: usize) -> T {
        let key = (i.min(j), i.max(j));
        self.quadratic.get(&key).copied().unwrap_or_else(T::zero)
    }

    pub fn num_linear(&self) -> usize {
        self.linear.len()
    }

    pub fn num_quadratic(&self) -> usize {
        self.quadratic.len()
    }

    pub fn add_offset(&mut self, c: T) {
        self.offset += c;
    }

    pub fn add_linear(&mut self, i: usize, c: T) {
        assert!(i < self.keys.len(), "variable {i} not declared");
        accumulate(&mut self.linear, i, c);
    }

    /// Adds `c * x_i * x_j`; the diagonal folds into the linear term.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: T) {
        if i == j {
            self.add_linear(i, c);
            return;
        }
        assert!(i.max(j) < self.keys.len(), "variable {} not declared", i.max(j));
        accumulate(&mut self.quadratic, (i.min(j), i.max(j)), c);
    }

    pub fn energy(&self, bits: &[bool]) -> T {
        assert_eq!(bits.len(), self.keys.len(), "assignment length mismatch");
        let mut e = self.offset;
        for (&i, &c) in &self.linear {
            if bits[i] {
                e += c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if bits[i] && bits[j] {
                e += c;
            }
        }
        e
    }

    /// Adds `weight * Σ_groups (Σ_{x ∈ group} x - 1)^2`.
    pub fn add_encoding_penalty(&mut self, groups: &[Vec<usize>], weight: T) -> Result<(), QuboError> {
        if let Some(n) = groups.iter().position(Vec::is_empty) {
            return Err(QuboError::EmptyGroup(n));
        }
        for group in groups {
            let terms: Vec<(usize, T)> = group.iter().map(|&x| (x, T::one())).collect();
            self.add_squared(&terms, -T::one(), weight);
        }
        Ok(())
    }

    /// Adds `weight * (Σ c_a x_a + constant)^2`, merging repeated variables.
    pub fn add_squared(&mut self, terms: &[(usize, T)], constant: T, weight: T) {
        let mut merged: BTreeMap<usize, T> = BTreeMap::new();
        for &(x, c) in terms {
            *merged.entry(x).or_insert_with(T::zero) += c;
        }
        let merged: Vec<(usize, T)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let two = T::lit(2.0);
        for (n, &(a, ca)) in merged.iter().enumerate() {
            // x^2 = x
            self.add_linear(a, weight * (ca * ca + two * constant * ca));
            for &(b, cb) in &merged[n + 1..] {
                self.add_quadratic(a, b, weight * two * ca * cb);
            }
        }
        self.add_offset(weight * constant * constant);
    }

    /// Adds `weight * s(x, y, z)` with `s = 3z + xy - 2xz - 2yz`, zero iff `z = xy`.
    pub fn add_product_gadget(&mut self, x: usize, y: usize, z: usize, weight: T) {
        self.add_linear(z, weight * T::lit(3.0));
        self.add_quadratic(x, y, weight);
        self.add_quadratic(x, z, -weight * T::lit(2.0));
        self.add_quadratic(y, z, -weight * T::lit(2.0));
    }

    /// Adds `weight * ((x + y)(1 - 2z) + xy + z)`, zero iff `z = x ∨ y`.
    pub fn add_or_gadget(&mut self, x: usize, y: usize, z: usize, weight: T) {
        self.add_linear(x, weight);
        self.add_linear(y, weight);
        self.add_linear(z, weight);
        self.add_quadratic(x, y, weight);
        self.add_quadratic(x, z, -weight * T::lit(2.0));
        self.add_quadratic(y, z, -weight * T::lit(2.0));
    }

    /// Rebuilds the form from raw parts; used by the importer.
    pub(crate) fn from_parts(
        keys: Vec<VariableKey>,
        linear: BTreeMap<usize, T>,
        quadratic: BTreeMap<(usize, usize), T>,
        offset: T,
    ) -> Result<Self, QuboError> {
        let mut index = HashMap::with_capacity(keys.len());
        for (i, k) in keys.iter().enumerate() {
            if index.insert(k.clone(), i).is_some() {
                return Err(QuboError::Malformed(format!("duplicate variable key {k:?}")));
            }
        }
        let mut form = Self {
            keys,
            index,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset,
        };
        for (i, c) in linear {
            form.add_linear(i, c);
        }
        for ((i, j), c) in quadratic {
            form.add_quadratic(i, j, c);
        }
        Ok(form)
    }
}

fn accumulate<K: Ord + Copy, T: Scalar>(map: &mut BTreeMap<K, T>, key: K, c: T) {
    if c.is_zero() {
        return;
    }
    let entry = map.entry(key).or_insert_with(T::zero);
    *entry += c;
    if entry.is_zero() {
        map.remove(&key);
    }
}
