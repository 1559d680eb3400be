//! Exact and annealing solvers, the constrained delay oracle, and the
//! penalty/discretization sweeps built on them.

mod anneal;
mod dense;
mod exact;
mod sweep;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::{BinaryQuadraticForm, DecodedSolution, QuboError, QuboModel};
use crate::scalar::{energy_eq, Scalar};

pub use anneal::{simulated_annealing, AnnealSchedule};
pub use exact::{
    brute_force_delays, brute_force_qubo, for_each_minimum, DelayOptimum, MAX_BRUTE_FORCE_VARIABLES,
    MAX_DELAY_ASSIGNMENTS,
};
pub use sweep::{
    discretization_sweep, penalty_validity_sweep, SweepRow, SweepSolver, SweepTable, ValidityCell, ValidityMap,
};

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("{variables} variables exceed the exhaustive-search limit of {limit}")]
    TooManyVariables { variables: usize, limit: usize },
    #[error("{assignments} delay assignments exceed the enumeration limit of {limit}")]
    TooManyAssignments { assignments: f64, limit: f64 },
    #[error("invalid annealing schedule: {0}")]
    InvalidSchedule(&'static str),
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

/// Best assignment found by a solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolveResult<T> {
    pub bits: Vec<bool>,
    /// Form energy at `bits`.
    pub energy: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoded: Option<DecodedSolution>,
    /// Number of assignments (exact) or single-bit proposals (annealing) evaluated.
    pub evaluations: u64,
    /// Best energy of every annealing restart; empty for exact search.
    pub restart_energies: Vec<T>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Solver selection for [`solve`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    BruteForce,
    Anneal(AnnealSchedule),
}

/// Runs `solver` on the model's form and decodes the best assignment.
pub fn solve<T: Scalar>(model: &QuboModel<T>, solver: &Solver) -> Result<SolveResult<T>, SolveError> {
    let mut result = solve_form(&model.form, solver)?;
    result.decoded = Some(model.decode(&result.bits));
    Ok(result)
}

pub fn solve_form<T: Scalar>(form: &BinaryQuadraticForm<T>, solver: &Solver) -> Result<SolveResult<T>, SolveError> {
    match solver {
        Solver::BruteForce => brute_force_qubo(form),
        Solver::Anneal(schedule) => simulated_annealing(form, schedule),
    }
}

/// Fraction of `results` whose energy equals `exact` within the energy tolerance.
pub fn success_probability<T: Scalar>(results: &[SolveResult<T>], exact: T) -> f64 {
    if results.is_empty() {
        return 0.0;
    }
    let hits = results.iter().filter(|r| energy_eq(r.energy, exact)).count();
    hits as f64 / results.len() as f64
}

/// Expected time to reach the optimum at least once with 99% confidence,
/// given per-run success probability `p` and run time `t_anneal`.
///
/// At least one run is always needed; `p = 0` gives infinity.
pub fn time_to_solution_99(p: f64, t_anneal: f64) -> f64 {
    if p >= 0.99 {
        t_anneal
    } else if p <= 0.0 {
        f64::INFINITY
    } else {
        (0.01f64.ln() / (1.0 - p).ln()) * t_anneal
    }
}

/// Bits of `mask`, least significant first.
pub(crate) fn mask_to_bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(energy: f64) -> SolveResult<f64> {
        SolveResult {
            bits: vec![],
            energy,
            decoded: None,
            evaluations: 0,
            restart_energies: vec![],
            wall_time: Duration::ZERO,
        }
    }

    #[test]
    fn success_fraction() {
        let rs: Vec<_> = [1.0, 1.0, 2.0, 1.0 + 1e-12].into_iter().map(result).collect();
        assert_eq!(success_probability(&rs, 1.0), 0.75);
        assert_eq!(success_probability(&rs[..2], 1.0), 1.0);
        assert_eq!(success_probability(&rs[2..3], 1.0), 0.0);
        assert_eq!(success_probability::<f64>(&[], 1.0), 0.0);
    }

    #[test]
    fn tts_reference_values() {
        assert_eq!(time_to_solution_99(0.99, 20e-6), 20e-6);
        assert_eq!(time_to_solution_99(1.0, 20e-6), 20e-6);
        assert_eq!(time_to_solution_99(0.0, 20e-6), f64::INFINITY);
        // log2(100) runs of 20 us
        let expected = 100f64.log2() * 20e-6;
        assert!((time_to_solution_99(0.5, 20e-6) - expected).abs() < 1e-15);
        assert!((time_to_solution_99(0.5, 20e-6) - 132.877e-6).abs() < 1e-9);
    }

    #[test]
    fn tts_decreases_with_p() {
        let mut last = f64::INFINITY;
        for n in 1..99 {
            let t = time_to_solution_99(n as f64 / 100.0, 1.0);
            assert!(t < last);
            last = t;
        }
    }
}
