use std::ops::ControlFlow;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dense::Dense;
use super::{mask_to_bits, SolveError, SolveResult};
use crate::graph::Instance;
use crate::qubo::{BinaryQuadraticForm, Discretization};
use crate::scalar::Scalar;

pub const MAX_BRUTE_FORCE_VARIABLES: usize = 30;
pub const MAX_DELAY_ASSIGNMENTS: f64 = 1e7;

/// Number of leading bits split into independent chunks.
const CHUNK_BITS: usize = 6;

fn check_size(n: usize) -> Result<(), SolveError> {
    if n > MAX_BRUTE_FORCE_VARIABLES {
        return Err(SolveError::TooManyVariables {
            variables: n,
            limit: MAX_BRUTE_FORCE_VARIABLES,
        });
    }
    Ok(())
}

/// Visits every assignment whose top `n - low` bits equal `chunk`, in Gray
/// code order over the low bits, passing the running energy and bits.
fn scan_chunk<T: Scalar>(
    dense: &Dense<T>,
    low: usize,
    chunk: u64,
    mut visit: impl FnMut(T, &[bool]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let n = dense.len();
    let mut bits = mask_to_bits(chunk << low, n);
    let (mut fields, mut energy) = dense.fields(&bits);
    visit(energy, &bits)?;
    for g in 1u64..1 << low {
        let i = g.trailing_zeros() as usize;
        energy += dense.flip(&mut bits, &mut fields, i);
        visit(energy, &bits)?;
    }
    ControlFlow::Continue(())
}

/// `bits` comes before `other` with index 0 most significant, `false < true`.
fn lex_less(bits: &[bool], other: &[bool]) -> bool {
    bits < other
}

fn split(n: usize) -> (usize, u64) {
    let high = n.min(CHUNK_BITS);
    (n - high, 1u64 << high)
}

/// Exhaustive minimum of `form`; among assignments within the energy
/// tolerance of the minimum the lexicographically smallest wins.
pub fn brute_force_qubo<T: Scalar>(form: &BinaryQuadraticForm<T>) -> Result<SolveResult<T>, SolveError> {
    let n = form.num_variables();
    check_size(n)?;
    let start = Instant::now();
    let dense = Dense::new(form);
    let (low, chunks) = split(n);
    let best_per_chunk: Vec<(T, Vec<bool>)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut best: Option<(T, Vec<bool>)> = None;
            let _ = scan_chunk(&dense, low, chunk, |e, bits| {
                if better(e, bits, &best) {
                    best = Some((e, bits.to_vec()));
                }
                ControlFlow::Continue(())
            });
            best.expect("non-empty chunk")
        })
        .collect();
    let mut best = None;
    for (e, bits) in best_per_chunk {
        if better(e, &bits, &best) {
            best = Some((e, bits));
        }
    }
    let (_, bits) = best.expect("at least one assignment");
    Ok(SolveResult {
        energy: form.energy(&bits),
        bits,
        decoded: None,
        evaluations: 1u64 << n,
        restart_energies: Vec::new(),
        wall_time: start.elapsed(),
    })
}

fn better<T: Scalar>(e: T, bits: &[bool], best: &Option<(T, Vec<bool>)>) -> bool {
    match best {
        None => true,
        Some((b, b_bits)) => {
            e < *b - T::ENERGY_TOLERANCE || (e <= *b + T::ENERGY_TOLERANCE && lex_less(bits, b_bits))
        }
    }
}

/// Calls `visit` on every assignment within the energy tolerance of the
/// global minimum, stopping early on `Break`. Returns the minimum energy.
pub fn for_each_minimum<T, F>(form: &BinaryQuadraticForm<T>, mut visit: F) -> Result<T, SolveError>
where
    T: Scalar,
    F: FnMut(&[bool]) -> ControlFlow<()>,
{
    let min = brute_force_qubo(form)?.energy;
    let dense = Dense::new(form);
    let (low, chunks) = split(form.num_variables());
    for chunk in 0..chunks {
        let flow = scan_chunk(&dense, low, chunk, |e, bits| {
            if e <= min + T::ENERGY_TOLERANCE {
                visit(bits)
            } else {
                ControlFlow::Continue(())
            }
        });
        if flow.is_break() {
            break;
        }
    }
    Ok(min)
}

/// Optimum of the constrained delay problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayOptimum {
    /// Lexicographically smallest minimum-delay feasible assignment, if any.
    pub delays: Option<Vec<i64>>,
    pub total_delay: Option<i64>,
    pub assignments: u64,
}

impl DelayOptimum {
    pub fn feasible(&self) -> bool {
        self.delays.is_some()
    }
}

/// Enumerates every assignment of allowed delays and keeps the feasible one
/// of least total delay.
pub fn brute_force_delays(instance: &Instance, disc: &Discretization) -> Result<DelayOptimum, SolveError> {
    disc.check_against(instance)?;
    let n = instance.num_flights();
    let base = disc.levels() as usize + 1;
    let assignments = (base as f64).powi(n as i32);
    if assignments > MAX_DELAY_ASSIGNMENTS {
        return Err(SolveError::TooManyAssignments {
            assignments,
            limit: MAX_DELAY_ASSIGNMENTS,
        });
    }
    let mut levels = vec![0usize; n];
    let mut delays = vec![0i64; n];
    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut count = 0u64;
    loop {
        count += 1;
        let total: i64 = delays.iter().sum();
        if best.as_ref().is_none_or(|(b, _)| total < *b) && instance.delays_feasible(&delays) {
            best = Some((total, delays.clone()));
        }
        // odometer, last flight fastest, so the first minimum found is lexicographically smallest
        let mut pos = n;
        loop {
            if pos == 0 {
                let (total_delay, delays) = match best {
                    Some((t, d)) => (Some(t), Some(d)),
                    None => (None, None),
                };
                return Ok(DelayOptimum {
                    delays,
                    total_delay,
                    assignments: count,
                });
            }
            pos -= 1;
            levels[pos] += 1;
            if levels[pos] < base {
                delays[pos] = disc.delay(levels[pos]);
                break;
            }
            levels[pos] = 0;
            delays[pos] = 0;
        }
    }
}
