//! Global trajectory modifications: every flight picks a departure delay and
//! one of several spatial transformations; forbidden combinations between
//! flight pairs are penalized through auxiliary product bits.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{one_hot, BinaryQuadraticForm, DecodedSolution, Discretization, ModelSpec, PenaltyWeights, QuboError, QuboModel, VariableKey};
use crate::graph::Instance;
use crate::scalar::Scalar;

/// One flight's choice: indices into its delay values and transformations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlightChoice {
    pub flight: usize,
    pub delay: usize,
    pub transform: usize,
}

/// A joint choice of two flights under which their modified trajectories conflict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ForbiddenCombination {
    pub first: FlightChoice,
    pub second: FlightChoice,
}

impl ForbiddenCombination {
    fn normalized(self) -> Self {
        if self.first.flight > self.second.flight {
            Self {
                first: self.second,
                second: self.first,
            }
        } else {
            self
        }
    }
}

/// Value sets and conflict table of the global-modification model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalModel {
    /// Allowed departure delays per flight, minutes.
    pub delay_values: Vec<Vec<i64>>,
    /// Transformation parameters per flight; only their count matters to the QUBO.
    pub transform_values: Vec<Vec<f64>>,
    pub forbidden: Vec<ForbiddenCombination>,
}

impl GlobalModel {
    pub fn validate(&self, flights: usize) -> Result<(), QuboError> {
        let bad = |m: String| Err(QuboError::InvalidGlobalModel(m));
        if self.delay_values.len() != flights || self.transform_values.len() != flights {
            return bad(format!(
                "{} delay sets and {} transformation sets for {flights} flights",
                self.delay_values.len(),
                self.transform_values.len()
            ));
        }
        if let Some(i) = (0..flights).find(|&i| self.delay_values[i].is_empty() || self.transform_values[i].is_empty()) {
            return bad(format!("flight {i} has an empty value set"));
        }
        for (n, f) in self.forbidden.iter().enumerate() {
            if f.first.flight == f.second.flight {
                return bad(format!("entry {n} pairs flight {} with itself", f.first.flight));
            }
            for c in [f.first, f.second] {
                if c.flight >= flights
                    || c.delay >= self.delay_values[c.flight].len()
                    || c.transform >= self.transform_values[c.flight].len()
                {
                    return bad(format!("entry {n} references unknown value {c:?}"));
                }
            }
        }
        Ok(())
    }

    /// Model with the instance's allowed delays and the identity as the only
    /// transformation; the forbidden combinations are exactly the delay
    /// pairs whose difference falls in a conflict's forbidden interval.
    pub fn from_instance(instance: &Instance, disc: &Discretization) -> Self {
        let flights = instance.num_flights();
        let delays: Vec<i64> = disc.delays().collect();
        let mut table = BTreeSet::new();
        for (k, c) in instance.conflicts().iter().enumerate() {
            let (i, j) = instance.endpoints(k);
            let b = c.forbidden_interval();
            for (a, &di) in delays.iter().enumerate() {
                for (m, &dj) in delays.iter().enumerate() {
                    if b.contains(di - dj) {
                        let choice = |flight, delay| FlightChoice {
                            flight,
                            delay,
                            transform: 0,
                        };
                        table.insert(
                            ForbiddenCombination {
                                first: choice(i, a),
                                second: choice(j, m),
                            }
                            .normalized(),
                        );
                    }
                }
            }
        }
        Self {
            delay_values: vec![delays; flights],
            transform_values: vec![vec![0.0]; flights],
            forbidden: table.into_iter().collect(),
        }
    }

    /// Uniform weight one minute above the widest spread of total delay
    /// between any two full assignments.
    pub fn sufficient_penalties<T: Scalar>(&self) -> PenaltyWeights<T> {
        let spread: i64 = self
            .delay_values
            .iter()
            .map(|v| v.iter().max().unwrap_or(&0) - v.iter().min().unwrap_or(&0))
            .sum();
        PenaltyWeights::uniform(T::from_int(spread + 1))
    }

    /// Random model for tests and demos: delays `0, 1, …` minutes and
    /// `forbidden` random combinations between distinct flights.
    pub fn random(flights: usize, delays: usize, transforms: usize, forbidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delay_values = vec![(0..delays as i64).collect(); flights];
        let transform_values = vec![(0..transforms).map(|p| p as f64).collect(); flights];
        let mut table = BTreeSet::new();
        if flights >= 2 {
            for _ in 0..forbidden {
                let a = rng.gen_range(0..flights);
                let b = (a + rng.gen_range(1..flights)) % flights;
                let mut choice = |flight| FlightChoice {
                    flight,
                    delay: rng.gen_range(0..delays),
                    transform: rng.gen_range(0..transforms),
                };
                let entry = ForbiddenCombination {
                    first: choice(a),
                    second: choice(b),
                };
                table.insert(entry.normalized());
            }
        }
        Self {
            delay_values,
            transform_values,
            forbidden: table.into_iter().collect(),
        }
    }
}

pub fn build_global_qubo<T: Scalar>(
    instance: &Instance,
    model: &GlobalModel,
    weights: &PenaltyWeights<T>,
) -> Result<QuboModel<T>, QuboError> {
    let flights = instance.num_flights();
    model.validate(flights)?;
    weights.validate()?;
    let mut form = BinaryQuadraticForm::new();
    let mut groups = Vec::with_capacity(2 * flights);
    for flight in 0..flights {
        let delays: Vec<usize> = (0..model.delay_values[flight].len())
            .map(|level| form.variable(VariableKey::DepartureDelay { flight, level }))
            .collect();
        let transforms: Vec<usize> = (0..model.transform_values[flight].len())
            .map(|option| form.variable(VariableKey::Transform { flight, option }))
            .collect();
        for (&x, &value) in delays.iter().zip(&model.delay_values[flight]) {
            form.add_linear(x, T::from_int(value));
        }
        groups.push(delays);
        groups.push(transforms);
    }
    form.add_encoding_penalty(&groups, weights.encoding)?;

    let mut gadgets = BTreeSet::new();
    for entry in model.forbidden.iter().map(|f| f.normalized()) {
        let (a, b) = (entry.first, entry.second);
        let pd = VariableKey::PairDelay {
            first: (a.flight, a.delay),
            second: (b.flight, b.delay),
        };
        let pt = VariableKey::PairTransform {
            first: (a.flight, a.transform),
            second: (b.flight, b.transform),
        };
        let zd = form.variable(pd.clone());
        let zt = form.variable(pt.clone());
        if gadgets.insert(pd) {
            let x = delay_bit(&form, a.flight, a.delay);
            let y = delay_bit(&form, b.flight, b.delay);
            form.add_product_gadget(x, y, zd, weights.consistency);
        }
        if gadgets.insert(pt) {
            let x = transform_bit(&form, a.flight, a.transform);
            let y = transform_bit(&form, b.flight, b.transform);
            form.add_product_gadget(x, y, zt, weights.consistency);
        }
        form.add_quadratic(zd, zt, weights.conflict);
    }
    Ok(QuboModel {
        form,
        spec: ModelSpec::Global {
            instance: instance.clone(),
            model: model.clone(),
        },
    })
}

fn delay_bit<T: Scalar>(form: &BinaryQuadraticForm<T>, flight: usize, level: usize) -> usize {
    form.index_of(&VariableKey::DepartureDelay { flight, level }).expect("declared delay bit")
}

fn transform_bit<T: Scalar>(form: &BinaryQuadraticForm<T>, flight: usize, option: usize) -> usize {
    form.index_of(&VariableKey::Transform { flight, option }).expect("declared transform bit")
}

pub(super) fn decode<T: Scalar>(
    form: &BinaryQuadraticForm<T>,
    instance: &Instance,
    model: &GlobalModel,
    bits: &[bool],
) -> DecodedSolution {
    let flights = instance.num_flights();
    let delay_choice: Vec<Option<usize>> = (0..flights)
        .map(|f| one_hot((0..model.delay_values[f].len()).map(|l| (delay_bit(form, f, l), l)), bits))
        .collect();
    let transforms: Vec<Option<usize>> = (0..flights)
        .map(|f| one_hot((0..model.transform_values[f].len()).map(|o| (transform_bit(form, f, o), o)), bits))
        .collect();
    let delays: Vec<Option<i64>> = delay_choice
        .iter()
        .enumerate()
        .map(|(f, c)| c.map(|l| model.delay_values[f][l]))
        .collect();
    let encoding_ok = delays.iter().all(Option::is_some) && transforms.iter().all(Option::is_some);

    let consistency_ok = form.keys().iter().enumerate().all(|(z, key)| match key {
        VariableKey::PairDelay { first, second } => {
            bits[z] == (bits[delay_bit(form, first.0, first.1)] && bits[delay_bit(form, second.0, second.1)])
        }
        VariableKey::PairTransform { first, second } => {
            bits[z] == (bits[transform_bit(form, first.0, first.1)] && bits[transform_bit(form, second.0, second.1)])
        }
        _ => true,
    });

    let chosen = |c: FlightChoice| delay_choice[c.flight] == Some(c.delay) && transforms[c.flight] == Some(c.transform);
    let violated_conflicts = model
        .forbidden
        .iter()
        .enumerate()
        .filter(|(_, f)| chosen(f.first) && chosen(f.second))
        .map(|(n, _)| n)
        .collect();
    DecodedSolution {
        total_delay: delays.iter().copied().sum::<Option<i64>>(),
        delays,
        transforms,
        encoding_ok,
        consistency_ok,
        violated_conflicts,
        ..Default::default()
    }
}
