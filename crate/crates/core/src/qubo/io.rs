//! Plain-text QUBO files and their JSON variable sidecar.
//!
//! ```text
//! c offset <value>
//! p qubo 0 <variables> <linear terms> <quadratic terms>
//! i i <value>
//! i j <value>
//! ```

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use super::{BinaryQuadraticForm, QuboError, VariableKey};
use crate::scalar::Scalar;

pub fn export_qubo<T: Scalar, W: Write>(form: &BinaryQuadraticForm<T>, mut sink: W) -> Result<(), QuboError> {
    writeln!(sink, "c offset {}", form.offset())?;
    writeln!(
        sink,
        "p qubo 0 {} {} {}",
        form.num_variables(),
        form.num_linear(),
        form.num_quadratic()
    )?;
    for (i, c) in form.linear() {
        writeln!(sink, "{i} {i} {c}")?;
    }
    for ((i, j), c) in form.quadratic() {
        writeln!(sink, "{i} {j} {c}")?;
    }
    sink.flush()?;
    Ok(())
}

/// Reads a QUBO file; variables get [`VariableKey::Anonymous`] keys.
pub fn import_qubo<T: Scalar, R: Read>(source: R) -> Result<BinaryQuadraticForm<T>, QuboError> {
    let malformed = |line: usize, what: &str| QuboError::Malformed(format!("line {line}: {what}"));
    let mut header: Option<(usize, usize, usize)> = None;
    let mut offset = T::zero();
    let mut linear = BTreeMap::new();
    let mut quadratic = BTreeMap::new();
    let (mut n_linear, mut n_quadratic) = (0, 0);

    for (n, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            ["c", "offset", value] => {
                offset = value.parse().map_err(|_| malformed(lineno, "bad offset"))?;
            }
            ["c", ..] => {}
            ["p", "qubo", _, vars, lin, quad] => {
                if header.is_some() {
                    return Err(malformed(lineno, "second header"));
                }
                let num = |s: &str| s.parse::<usize>().map_err(|_| malformed(lineno, "bad header count"));
                header = Some((num(vars)?, num(lin)?, num(quad)?));
            }
            [i, j, value] => {
                let (count, _, _) = header.ok_or_else(|| malformed(lineno, "term before header"))?;
                let index = |s: &str| s.parse::<usize>().map_err(|_| malformed(lineno, "bad index"));
                let (i, j) = (index(i)?, index(j)?);
                let c: T = value.parse().map_err(|_| malformed(lineno, "bad coefficient"))?;
                for index in [i, j] {
                    if index >= count {
                        return Err(QuboError::IndexOutOfRange { index, count });
                    }
                }
                if i == j {
                    n_linear += 1;
                    *linear.entry(i).or_insert_with(T::zero) += c;
                } else {
                    n_quadratic += 1;
                    *quadratic.entry((i.min(j), i.max(j))).or_insert_with(T::zero) += c;
                }
            }
            _ => return Err(malformed(lineno, "unrecognized line")),
        }
    }

    let (count, lin, quad) = header.ok_or_else(|| QuboError::Malformed("missing header".into()))?;
    if (lin, quad) != (n_linear, n_quadratic) {
        return Err(QuboError::Malformed(format!(
            "header announces {lin} linear and {quad} quadratic terms, found {n_linear} and {n_quadratic}"
        )));
    }
    let keys = (0..count).map(|index| VariableKey::Anonymous { index }).collect();
    BinaryQuadraticForm::from_parts(keys, linear, quadratic, offset)
}

/// Writes the index-to-key map as a JSON array.
pub fn export_variables<T: Scalar, W: Write>(form: &BinaryQuadraticForm<T>, sink: W) -> Result<(), QuboError> {
    serde_json::to_writer_pretty(sink, form.keys()).map_err(|e| QuboError::Io(e.to_string()))
}

pub fn import_variables<R: Read>(source: R) -> Result<Vec<VariableKey>, QuboError> {
    serde_json::from_reader(source).map_err(|e| QuboError::Malformed(e.to_string()))
}

impl<T: Scalar> BinaryQuadraticForm<T> {
    /// Replaces the variable keys, e.g. with a sidecar read by [`import_variables`].
    pub fn with_keys(self, keys: Vec<VariableKey>) -> Result<Self, QuboError> {
        if keys.len() != self.num_variables() {
            return Err(QuboError::Malformed(format!(
                "{} variable keys for {} variables",
                keys.len(),
                self.num_variables()
            )));
        }
        let linear = self.linear().collect();
        let quadratic = self.quadratic().collect();
        Self::from_parts(keys, linear, quadratic, self.offset())
    }
}
