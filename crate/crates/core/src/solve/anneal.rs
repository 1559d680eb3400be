use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dense::Dense;
use super::{SolveError, SolveResult};
use crate::qubo::BinaryQuadraticForm;
use crate::scalar::Scalar;

/// Restarted single-spin-flip Metropolis annealing on a geometric
/// inverse-temperature ladder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub restarts: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    /// Restart `r` is seeded with `seed + r`.
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            sweeps: 3000,
            restarts: 100,
            beta_start: 0.003,
            beta_end: 3.0,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.sweeps == 0 || self.restarts == 0 {
            return Err(SolveError::InvalidSchedule("sweeps and restarts must be positive"));
        }
        if !(self.beta_start > 0.0 && self.beta_end > self.beta_start && self.beta_end.is_finite()) {
            return Err(SolveError::InvalidSchedule("need 0 < beta_start < beta_end"));
        }
        Ok(())
    }

    /// Inverse temperature of sweep `s`.
    pub fn beta(&self, s: usize) -> f64 {
        if self.sweeps == 1 {
            return self.beta_end;
        }
        let t = s as f64 / (self.sweeps - 1) as f64;
        self.beta_start * (self.beta_end / self.beta_start).powf(t)
    }
}

fn run<T: Scalar>(dense: &Dense<T>, schedule: &AnnealSchedule, seed: u64) -> (T, Vec<bool>) {
    let n = dense.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let (mut fields, mut energy) = dense.fields(&bits);
    let mut best = (energy, bits.clone());
    for s in 0..schedule.sweeps {
        let beta = schedule.beta(s);
        for i in 0..n {
            let delta = dense.delta(&bits, &fields, i).to_f64().unwrap_or(f64::INFINITY);
            if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                energy += dense.flip(&mut bits, &mut fields, i);
                if energy < best.0 {
                    best = (energy, bits.clone());
                }
            }
        }
    }
    best
}

/// Anneals every restart independently and returns the best assignment over
/// all of them; earlier restarts win ties.
pub fn simulated_annealing<T: Scalar>(
    form: &BinaryQuadraticForm<T>,
    schedule: &AnnealSchedule,
) -> Result<SolveResult<T>, SolveError> {
    schedule.validate()?;
    let start = Instant::now();
    let dense = Dense::new(form);
    let runs: Vec<(T, Vec<bool>)> = (0..schedule.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let (_, bits) = run(&dense, schedule, schedule.seed.wrapping_add(r));
            (form.energy(&bits), bits)
        })
        .collect();
    let restart_energies: Vec<T> = runs.iter().map(|(e, _)| *e).collect();
    let (energy, bits) = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one restart");
    Ok(SolveResult {
        bits,
        energy,
        decoded: None,
        evaluations: (schedule.sweeps * schedule.restarts * form.num_variables()) as u64,
        restart_energies,
        wall_time: start.elapsed(),
    })
}
