//! Compilation of de-confliction instances into binary quadratic forms.
//!
//! Five models are supported: departure delays only ([`build_departure_qubo`]),
//! global trajectory modifications ([`build_global_qubo`]), and three local
//! maneuver models ([`build_exclusive_qubo`], [`build_flexible_qubo`],
//! [`build_interstitial_qubo`]). Every builder returns a [`QuboModel`] that
//! pairs the form with what is needed to decode its bit assignments.

mod departure;
mod exclusive;
mod flexible;
mod form;
mod global;
mod interstitial;
mod io;
mod ising;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Instance;
use crate::scalar::Scalar;

pub use departure::build_departure_qubo;
pub use exclusive::build_exclusive_qubo;
pub use flexible::build_flexible_qubo;
pub use form::{BinaryQuadraticForm, VariableKey};
pub use global::{build_global_qubo, FlightChoice, ForbiddenCombination, GlobalModel};
pub use interstitial::build_interstitial_qubo;
pub use io::{export_qubo, export_variables, import_qubo, import_variables};
pub use ising::{to_ising, IsingForm};

#[derive(Debug, Error, PartialEq)]
pub enum QuboError {
    #[error("encoding group {0} is empty")]
    EmptyGroup(usize),
    #[error("delay step must be positive and the level count non-negative")]
    InvalidDiscretization,
    #[error("maximum delay {d_max} is not a multiple of the delay step {step}")]
    NotDivisible { d_max: i64, step: i64 },
    #[error("discretization reaches {requested} min but the instance was detected with d_max = {instance}")]
    MismatchedDmax { requested: i64, instance: i64 },
    #[error("penalty weights must be finite and non-negative")]
    InvalidWeights,
    #[error("no {what} given for flight {flight} at conflict {conflict}")]
    MissingTableEntry { what: &'static str, flight: usize, conflict: usize },
    #[error("conflict {conflict}: delay difference {difference} is not on the {step}-minute grid")]
    GammaGrid { conflict: usize, difference: i64, step: i64 },
    #[error("flight {0} has no conflicts")]
    NoConflicts(usize),
    #[error("invalid global model: {0}")]
    InvalidGlobalModel(String),
    #[error("all Ising coefficients are zero")]
    AllZero,
    #[error("malformed QUBO file: {0}")]
    Malformed(String),
    #[error("variable {index} out of range for {count} variables")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for QuboError {
    fn from(e: std::io::Error) -> Self {
        QuboError::Io(e.to_string())
    }
}

/// Allowed delays `{0, step, 2·step, …, levels·step}` in minutes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discretization {
    step: i64,
    levels: i64,
}

impl Discretization {
    pub fn new(step: i64, levels: i64) -> Result<Self, QuboError> {
        if step <= 0 || levels < 0 {
            return Err(QuboError::InvalidDiscretization);
        }
        Ok(Self { step, levels })
    }

    /// Discretization with the given step whose largest delay is `d_max`.
    pub fn from_max(step: i64, d_max: i64) -> Result<Self, QuboError> {
        if step <= 0 || d_max < 0 {
            return Err(QuboError::InvalidDiscretization);
        }
        if d_max % step != 0 {
            return Err(QuboError::NotDivisible { d_max, step });
        }
        Self::new(step, d_max / step)
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    /// Number of nonzero levels, `N_d`.
    pub fn levels(&self) -> i64 {
        self.levels
    }

    pub fn d_max(&self) -> i64 {
        self.step * self.levels
    }

    pub fn delay(&self, level: usize) -> i64 {
        self.step * level as i64
    }

    /// All allowed delays in increasing order.
    pub fn delays(&self) -> impl Iterator<Item = i64> + '_ {
        (0..=self.levels).map(move |l| l * self.step)
    }

    pub(crate) fn check_against(&self, instance: &Instance) -> Result<(), QuboError> {
        if self.d_max() > instance.d_max() {
            return Err(QuboError::MismatchedDmax {
                requested: self.d_max(),
                instance: instance.d_max(),
            });
        }
        Ok(())
    }
}

/// Weights of the encoding, conflict and consistency penalty terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PenaltyWeights<T> {
    pub encoding: T,
    pub conflict: T,
    pub consistency: T,
}

impl<T: Scalar> PenaltyWeights<T> {
    pub fn new(encoding: T, conflict: T, consistency: T) -> Result<Self, QuboError> {
        let w = Self {
            encoding,
            conflict,
            consistency,
        };
        w.validate()?;
        Ok(w)
    }

    /// The same weight on every term; checked when a model is built.
    pub fn uniform(value: T) -> Self {
        Self {
            encoding: value,
            conflict: value,
            consistency: value,
        }
    }

    pub fn validate(&self) -> Result<(), QuboError> {
        let ok = |v: T| v.is_finite() && v >= T::zero();
        if ok(self.encoding) && ok(self.conflict) && ok(self.consistency) {
            Ok(())
        } else {
            Err(QuboError::InvalidWeights)
        }
    }
}

/// Uniform weight one step above `N_f * d_max`, the largest total delay a
/// feasible assignment can carry. Every violated constraint costs at least
/// the weight, so no infeasible state can undercut the feasible optimum.
pub fn sufficient_penalties<T: Scalar>(instance: &Instance, disc: &Discretization) -> PenaltyWeights<T> {
    sufficient_penalties_with(instance, disc, &FlightConflictTable::new())
}

/// [`sufficient_penalties`] raised by every flight's total in `table`, the
/// most that maneuvers or interstitial steps can add beyond the departure
/// delay.
pub fn sufficient_penalties_with<T: Scalar>(
    instance: &Instance,
    disc: &Discretization,
    table: &FlightConflictTable,
) -> PenaltyWeights<T> {
    let worst: i64 = (0..instance.num_flights())
        .map(|i| {
            let extra: i64 = instance
                .flight_conflicts(i)
                .iter()
                .map(|&k| table.get(i, k).unwrap_or(0).max(0))
                .sum();
            disc.d_max() + extra
        })
        .sum();
    PenaltyWeights::uniform(T::from_int(worst + disc.step()))
}

/// Per-(flight, conflict) minutes: maneuver delays or interstitial bounds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlightConflictTable(BTreeMap<(usize, usize), i64>);

impl FlightConflictTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The same value for both flights of every conflict.
    pub fn uniform(instance: &Instance, value: i64) -> Self {
        let mut t = Self::new();
        for k in 0..instance.num_conflicts() {
            let (i, j) = instance.endpoints(k);
            t.insert(i, k, value);
            t.insert(j, k, value);
        }
        t
    }

    pub fn insert(&mut self, flight: usize, conflict: usize, minutes: i64) {
        self.0.insert((flight, conflict), minutes);
    }

    pub fn get(&self, flight: usize, conflict: usize) -> Option<i64> {
        self.0.get(&(flight, conflict)).copied()
    }

    pub(crate) fn require(&self, what: &'static str, flight: usize, conflict: usize) -> Result<i64, QuboError> {
        self.get(flight, conflict)
            .ok_or(QuboError::MissingTableEntry { what, flight, conflict })
    }
}

/// What a compiled form encodes, kept for decoding.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Departure {
        instance: Instance,
        disc: Discretization,
    },
    Global {
        instance: Instance,
        model: GlobalModel,
    },
    Exclusive {
        instance: Instance,
        disc: Discretization,
        maneuvers: FlightConflictTable,
    },
    Flexible {
        instance: Instance,
        disc: Discretization,
        maneuvers: FlightConflictTable,
        allow_both: bool,
    },
    Interstitial {
        instance: Instance,
        disc: Discretization,
        bounds: FlightConflictTable,
    },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Departure { .. } => "departure",
            ModelSpec::Global { .. } => "global",
            ModelSpec::Exclusive { .. } => "exclusive",
            ModelSpec::Flexible { .. } => "flexible",
            ModelSpec::Interstitial { .. } => "interstitial",
        }
    }

    pub fn instance(&self) -> &Instance {
        match self {
            ModelSpec::Departure { instance, .. }
            | ModelSpec::Global { instance, .. }
            | ModelSpec::Exclusive { instance, .. }
            | ModelSpec::Flexible { instance, .. }
            | ModelSpec::Interstitial { instance, .. } => instance,
        }
    }
}

/// A compiled form together with its model description.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboModel<T> {
    pub form: BinaryQuadraticForm<T>,
    pub spec: ModelSpec,
}

impl<T: Scalar> QuboModel<T> {
    pub fn num_variables(&self) -> usize {
        self.form.num_variables()
    }

    pub fn energy(&self, bits: &[bool]) -> T {
        self.form.energy(bits)
    }

    /// Interprets a bit assignment; constraint violations are flagged, not fatal.
    pub fn decode(&self, bits: &[bool]) -> DecodedSolution {
        assert_eq!(bits.len(), self.form.num_variables(), "assignment length mismatch");
        match &self.spec {
            ModelSpec::Departure { instance, disc } => departure::decode(&self.form, instance, disc, bits),
            ModelSpec::Global { instance, model } => global::decode(&self.form, instance, model, bits),
            ModelSpec::Exclusive {
                instance,
                disc,
                maneuvers,
            } => exclusive::decode(&self.form, instance, disc, maneuvers, bits),
            ModelSpec::Flexible {
                instance,
                disc,
                maneuvers,
                allow_both,
            } => flexible::decode(&self.form, instance, disc, maneuvers, *allow_both, bits),
            ModelSpec::Interstitial { instance, disc, bounds } => {
                interstitial::decode(&self.form, instance, disc, bounds, bits)
            }
        }
    }
}

/// Decoded delays and maneuvers with constraint flags.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedSolution {
    /// Departure delay per flight in minutes; `None` where the one-hot group is broken.
    pub delays: Vec<Option<i64>>,
    /// Chosen transformation per flight (global model only).
    pub transforms: Vec<Option<usize>>,
    /// Active maneuvers as `(conflict, flight)`.
    pub maneuvers: Vec<(usize, usize)>,
    /// Accumulated delay per `(flight, conflict)` where the model tracks it.
    pub accumulated: BTreeMap<(usize, usize), Option<i64>>,
    pub encoding_ok: bool,
    pub consistency_ok: bool,
    /// Conflicts (or forbidden combinations, for the global model) not avoided.
    pub violated_conflicts: Vec<usize>,
    /// Total delay over all flights; `None` when the encoding is broken.
    pub total_delay: Option<i64>,
}

impl DecodedSolution {
    pub fn feasible(&self) -> bool {
        self.encoding_ok && self.consistency_ok && self.violated_conflicts.is_empty()
    }
}

/// Value of a one-hot group: the single set member, or `None` if zero or
/// several bits are set.
pub(crate) fn one_hot<'a, V: Copy + 'a>(members: impl IntoIterator<Item = (usize, V)>, bits: &[bool]) -> Option<V> {
    let mut found = None;
    for (index, value) in members {
        if bits[index] {
            if found.is_some() {
                return None;
            }
            found = Some(value);
        }
    }
    found
}

/// Adds one-hot departure-delay bits for every flight and returns the groups.
pub(crate) fn departure_groups<T: Scalar>(
    form: &mut BinaryQuadraticForm<T>,
    flights: usize,
    disc: &Discretization,
) -> Vec<Vec<usize>> {
    (0..flights)
        .map(|flight| {
            (0..=disc.levels() as usize)
                .map(|level| form.variable(VariableKey::DepartureDelay { flight, level }))
                .collect()
        })
        .collect()
}

/// Adds `Σ_i Σ_l step·l·d_{i,l}`.
pub(crate) fn add_departure_delay_cost<T: Scalar>(
    form: &mut BinaryQuadraticForm<T>,
    groups: &[Vec<usize>],
    disc: &Discretization,
) {
    for group in groups {
        for (level, &x) in group.iter().enumerate() {
            form.add_linear(x, T::from_int(disc.delay(level)));
        }
    }
}

/// Decoded departure delays per flight.
pub(crate) fn decode_departures<T: Scalar>(
    form: &BinaryQuadraticForm<T>,
    flights: usize,
    disc: &Discretization,
    bits: &[bool],
) -> Vec<Option<i64>> {
    (0..flights)
        .map(|flight| {
            let members = (0..=disc.levels() as usize).map(|level| {
                let x = form
                    .index_of(&VariableKey::DepartureDelay { flight, level })
                    .expect("departure bit");
                (x, disc.delay(level))
            });
            one_hot(members, bits)
        })
        .collect()
}
