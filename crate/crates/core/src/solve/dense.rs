use crate::qubo::BinaryQuadraticForm;
use crate::scalar::Scalar;

/// Adjacency-list copy of a form for fast single-bit updates.
pub(crate) struct Dense<T> {
    pub linear: Vec<T>,
    pub neighbors: Vec<Vec<(usize, T)>>,
    pub offset: T,
}

impl<T: Scalar> Dense<T> {
    pub fn new(form: &BinaryQuadraticForm<T>) -> Self {
        let n = form.num_variables();
        let mut linear = vec![T::zero(); n];
        for (i, c) in form.linear() {
            linear[i] = c;
        }
        let mut neighbors = vec![Vec::new(); n];
        for ((i, j), c) in form.quadratic() {
            neighbors[i].push((j, c));
            neighbors[j].push((i, c));
        }
        Self {
            linear,
            neighbors,
            offset: form.offset(),
        }
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    /// Local fields `f_i = linear_i + Σ_j Q_ij x_j` and the energy at `bits`.
    pub fn fields(&self, bits: &[bool]) -> (Vec<T>, T) {
        let mut fields = self.linear.clone();
        let mut energy = self.offset;
        for (i, adj) in self.neighbors.iter().enumerate() {
            if bits[i] {
                energy += self.linear[i];
                for &(j, c) in adj {
                    fields[j] += c;
                    if j > i && bits[j] {
                        energy += c;
                    }
                }
            }
        }
        (fields, energy)
    }

    /// Flips bit `i`, updating neighbor fields; returns the energy change.
    #[inline]
    pub fn flip(&self, bits: &mut [bool], fields: &mut [T], i: usize) -> T {
        let delta = if bits[i] { -fields[i] } else { fields[i] };
        bits[i] = !bits[i];
        let sign = if bits[i] { T::one() } else { -T::one() };
        for &(j, c) in &self.neighbors[i] {
            fields[j] += sign * c;
        }
        delta
    }

    /// Energy change of flipping bit `i`.
    #[inline]
    pub fn delta(&self, bits: &[bool], fields: &[T], i: usize) -> T {
        if bits[i] {
            -fields[i]
        } else {
            fields[i]
        }
    }
}
