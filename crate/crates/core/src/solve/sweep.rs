use std::io::Write;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{brute_force_delays, for_each_minimum, solve, AnnealSchedule, SolveError, Solver};
use crate::graph::Instance;
use crate::qubo::{build_departure_qubo, sufficient_penalties, Discretization, PenaltyWeights};
use crate::scalar::Scalar;

/// Validity of one `(λ_conflict, λ_encoding)` pair for the departure model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ValidityCell<T> {
    pub lambda_conflict: T,
    pub lambda_encoding: T,
    /// Every global minimum decodes to a feasible delay assignment.
    pub valid: bool,
    pub min_energy: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ValidityMap<T> {
    /// Row-major over the conflict weights, then the encoding weights.
    pub cells: Vec<ValidityCell<T>>,
}

impl<T: Scalar> ValidityMap<T> {
    pub fn get(&self, lambda_conflict: T, lambda_encoding: T) -> Option<&ValidityCell<T>> {
        self.cells
            .iter()
            .find(|c| c.lambda_conflict == lambda_conflict && c.lambda_encoding == lambda_encoding)
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> csv::Result<()> {
        write_rows(sink, &self.cells)
    }
}

fn write_rows<W: Write, R: Serialize>(sink: W, rows: &[R]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Marks every weight pair valid iff all exact minima of the departure model
/// decode to feasible solutions.
pub fn penalty_validity_sweep<T: Scalar>(
    instance: &Instance,
    disc: &Discretization,
    conflict_weights: &[T],
    encoding_weights: &[T],
) -> Result<ValidityMap<T>, SolveError> {
    let grid: Vec<(T, T)> = conflict_weights
        .iter()
        .flat_map(|&c| encoding_weights.iter().map(move |&e| (c, e)))
        .collect();
    let cells = grid
        .into_par_iter()
        .map(|(lambda_conflict, lambda_encoding)| {
            let weights = PenaltyWeights::new(lambda_encoding, lambda_conflict, T::zero())?;
            let model = build_departure_qubo(instance, disc, &weights)?;
            let mut valid = true;
            let min_energy = for_each_minimum(&model.form, |bits| {
                if model.decode(bits).feasible() {
                    ControlFlow::Continue(())
                } else {
                    valid = false;
                    ControlFlow::Break(())
                }
            })?;
            Ok(ValidityCell {
                lambda_conflict,
                lambda_encoding,
                valid,
                min_energy,
            })
        })
        .collect::<Result<Vec<_>, SolveError>>()?;
    Ok(ValidityMap { cells })
}

/// How [`discretization_sweep`] finds each minimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepSolver {
    /// Constrained delay enumeration.
    Enumeration,
    /// Exhaustive search over the departure QUBO with sufficient penalties.
    BruteForce,
    /// Annealing on the departure QUBO with sufficient penalties.
    Anneal(AnnealSchedule),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta_d: i64,
    pub d_max: i64,
    pub min_total_delay: Option<i64>,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedSetting {
    pub delta_d: i64,
    pub d_max: i64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedSetting>,
}

impl SweepTable {
    pub fn get(&self, delta_d: i64, d_max: i64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.delta_d == delta_d && r.d_max == d_max)
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> csv::Result<()> {
        write_rows(sink, &self.rows)
    }
}

/// Minimum total delay for every `(Δd, d_max)` combination, `Δd` outermost.
/// Combinations with `d_max` not a multiple of `Δd`, or beyond the instance's
/// detection window, are listed as skipped.
pub fn discretization_sweep(
    instance: &Instance,
    steps: &[i64],
    d_maxes: &[i64],
    solver: &SweepSolver,
) -> Result<SweepTable, SolveError> {
    let mut table = SweepTable::default();
    for &delta_d in steps {
        for &d_max in d_maxes {
            let skip = |reason: String| SkippedSetting { delta_d, d_max, reason };
            let disc = match Discretization::from_max(delta_d, d_max) {
                Ok(d) => d,
                Err(e) => {
                    table.skipped.push(skip(e.to_string()));
                    continue;
                }
            };
            if d_max > instance.d_max() {
                table.skipped.push(skip(format!(
                    "conflicts were detected for delays up to {} min",
                    instance.d_max()
                )));
                continue;
            }
            let min_total_delay = match solver {
                SweepSolver::Enumeration => brute_force_delays(instance, &disc)?.total_delay,
                SweepSolver::BruteForce | SweepSolver::Anneal(_) => {
                    let model = build_departure_qubo(instance, &disc, &sufficient_penalties::<f64>(instance, &disc))?;
                    let qubo_solver = match solver {
                        SweepSolver::Anneal(s) => Solver::Anneal(*s),
                        _ => Solver::BruteForce,
                    };
                    let decoded = solve(&model, &qubo_solver)?.decoded.expect("decoded by solve");
                    if decoded.feasible() {
                        decoded.total_delay
                    } else {
                        None
                    }
                }
            };
            table.rows.push(SweepRow {
                delta_d,
                d_max,
                min_total_delay,
                feasible: min_total_delay.is_some(),
            });
        }
    }
    Ok(table)
}
