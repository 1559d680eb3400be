//! Interstitial delays: flights absorb extra delay on the legs between
//! consecutive conflicts, and conflicts are avoided only through the delay
//! accumulated on arrival.

use std::collections::BTreeMap;

use super::{
    decode_departures, departure_groups, one_hot, BinaryQuadraticForm, DecodedSolution, Discretization,
    FlightConflictTable, ModelSpec, PenaltyWeights, QuboError, QuboModel, VariableKey,
};
use crate::graph::Instance;
use crate::scalar::Scalar;

/// `(conflict, allowed accumulated delays)` in one flight's conflict order.
type FlightGrid = Vec<(usize, Vec<i64>)>;

/// Accumulated-delay values per `(flight, conflict)` in the flight's conflict order.
fn grids(
    instance: &Instance,
    bounds: &FlightConflictTable,
    disc: &Discretization,
) -> Result<Vec<FlightGrid>, QuboError> {
    (0..instance.num_flights())
        .map(|f| {
            let order = instance.flight_conflicts(f);
            if order.is_empty() {
                return Err(QuboError::NoConflicts(f));
            }
            let mut slack = 0;
            order
                .iter()
                .map(|&k| {
                    slack += bounds.require("interstitial bound", f, k)?;
                    let top = (disc.d_max() + slack) / disc.step();
                    Ok((k, (0..=top).map(|g| g * disc.step()).collect()))
                })
                .collect()
        })
        .collect()
}

fn accum_bits<T: Scalar>(form: &BinaryQuadraticForm<T>, flight: usize, conflict: usize, grid: &[i64]) -> Vec<usize> {
    grid.iter()
        .map(|&value| {
            form.index_of(&VariableKey::AccumDelay { flight, conflict, value })
                .expect("accumulated delay bit")
        })
        .collect()
}

/// Whether a leg may take the accumulated delay from `before` to `after`.
fn leg_allowed(before: i64, after: i64, bound: i64) -> bool {
    after >= before && after - before <= bound
}

pub fn build_interstitial_qubo<T: Scalar>(
    instance: &Instance,
    bounds: &FlightConflictTable,
    disc: &Discretization,
    weights: &PenaltyWeights<T>,
) -> Result<QuboModel<T>, QuboError> {
    disc.check_against(instance)?;
    weights.validate()?;
    let grids = grids(instance, bounds, disc)?;
    let mut form = BinaryQuadraticForm::new();
    let mut groups = departure_groups(&mut form, instance.num_flights(), disc);
    for (flight, legs) in grids.iter().enumerate() {
        for (conflict, grid) in legs {
            let group = grid
                .iter()
                .map(|&value| {
                    form.variable(VariableKey::AccumDelay {
                        flight,
                        conflict: *conflict,
                        value,
                    })
                })
                .collect();
            groups.push(group);
        }
    }
    form.add_encoding_penalty(&groups, weights.encoding)?;

    for (f, legs) in grids.iter().enumerate() {
        // (bits, values) of the previous checkpoint, starting at departure
        let mut previous: (Vec<usize>, Vec<i64>) = (groups[f].clone(), disc.delays().collect());
        for (k, grid) in legs {
            let bound = bounds.require("interstitial bound", f, *k)?;
            let current = accum_bits(&form, f, *k, grid);
            for (&y, &before) in previous.0.iter().zip(&previous.1) {
                for (&x, &after) in current.iter().zip(grid) {
                    if !leg_allowed(before, after, bound) {
                        form.add_quadratic(x, y, weights.consistency);
                    }
                }
            }
            previous = (current, grid.clone());
        }
        for (&x, &value) in previous.0.iter().zip(&previous.1) {
            form.add_linear(x, T::from_int(value));
        }
    }

    for (k, conflict) in instance.conflicts().iter().enumerate() {
        let (i, j) = instance.endpoints(k);
        let grid_of = |f: usize| &grids[f].iter().find(|(c, _)| *c == k).expect("conflict of flight").1;
        let (gi, gj) = (grid_of(i), grid_of(j));
        let (bi, bj) = (accum_bits(&form, i, k, gi), accum_bits(&form, j, k, gj));
        let forbidden = conflict.forbidden_interval();
        for (&x, &a) in bi.iter().zip(gi) {
            for (&y, &b) in bj.iter().zip(gj) {
                if forbidden.contains(a - b) {
                    form.add_quadratic(x, y, weights.conflict);
                }
            }
        }
    }

    Ok(QuboModel {
        form,
        spec: ModelSpec::Interstitial {
            instance: instance.clone(),
            disc: *disc,
            bounds: bounds.clone(),
        },
    })
}

pub(super) fn decode<T: Scalar>(
    form: &BinaryQuadraticForm<T>,
    instance: &Instance,
    disc: &Discretization,
    bounds: &FlightConflictTable,
    bits: &[bool],
) -> DecodedSolution {
    let delays = decode_departures(form, instance.num_flights(), disc, bits);
    let mut accumulated = BTreeMap::new();
    for (x, key) in form.keys().iter().enumerate() {
        if let VariableKey::AccumDelay { flight, conflict, .. } = *key {
            accumulated.entry((flight, conflict)).or_insert_with(Vec::new).push(x);
        }
    }
    let accumulated: BTreeMap<(usize, usize), Option<i64>> = accumulated
        .into_iter()
        .map(|(fk, members)| {
            let values = members.into_iter().map(|x| match *form.key(x) {
                VariableKey::AccumDelay { value, .. } => (x, value),
                _ => unreachable!(),
            });
            (fk, one_hot(values, bits))
        })
        .collect();
    let encoding_ok = delays.iter().all(Option::is_some) && accumulated.values().all(Option::is_some);

    let mut consistency_ok = true;
    let mut total = Some(0);
    for (f, &departure) in delays.iter().enumerate() {
        let mut before = departure;
        for &k in instance.flight_conflicts(f) {
            let after = accumulated[&(f, k)];
            if let (Some(b), Some(a)) = (before, after) {
                consistency_ok &= leg_allowed(b, a, bounds.get(f, k).unwrap_or(0));
            }
            before = after;
        }
        total = match (total, before) {
            (Some(t), Some(d)) => Some(t + d),
            _ => None,
        };
    }

    let violated_conflicts = instance
        .conflicts()
        .iter()
        .enumerate()
        .filter(|(k, c)| {
            let (i, j) = instance.endpoints(*k);
            matches!((accumulated[&(i, *k)], accumulated[&(j, *k)]), (Some(a), Some(b)) if !c.is_avoided(a, b))
        })
        .map(|(k, _)| k)
        .collect();

    DecodedSolution {
        delays,
        accumulated,
        encoding_ok,
        consistency_ok,
        violated_conflicts,
        total_delay: total,
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::{Conflict, ConflictSet, PointPair};

    fn instance(d_max: i64) -> Instance {
        let c = Conflict::new(0, "A", "B", vec![PointPair::new(10, 10)], 1).unwrap();
        Instance::from_conflicts(vec![c], d_max).unwrap()
    }

    #[test]
    fn grid_grows_with_slack() {
        let k0 = Conflict::new(0, "A", "B", vec![PointPair::new(5, 5)], 3).unwrap();
        let k1 = Conflict::new(1, "A", "C", vec![PointPair::new(20, 20)], 3).unwrap();
        let inst = Instance::from_conflicts(vec![k0, k1], 2).unwrap();
        let g = grids(&inst, &FlightConflictTable::uniform(&inst, 2), &Discretization::new(2, 1).unwrap()).unwrap();
        assert_eq!(g[0], vec![(0, vec![0, 2, 4]), (1, vec![0, 2, 4, 6])]);
        assert_eq!(g[2], vec![(1, vec![0, 2, 4])]);
    }

    #[test]
    fn flight_without_conflicts_is_rejected() {
        let inst = Instance::new(vec!["A".into()], ConflictSet::default(), 0).unwrap();
        let err = build_interstitial_qubo(
            &inst,
            &FlightConflictTable::new(),
            &Discretization::new(1, 0).unwrap(),
            &PenaltyWeights::<f64>::uniform(1.0),
        )
        .unwrap_err();
        assert_eq!(err, QuboError::NoConflicts(0));
    }

    #[test]
    fn zero_bound_pins_accumulated_to_departure() {
        let inst = instance(1);
        let disc = Discretization::new(1, 1).unwrap();
        let model =
            build_interstitial_qubo(&inst, &FlightConflictTable::uniform(&inst, 0), &disc, &PenaltyWeights::uniform(5.0))
                .unwrap();
        // 2 departure + 2 accumulated bits per flight
        assert_eq!(model.num_variables(), 8);
        let key = |flight, value| VariableKey::AccumDelay { flight, conflict: 0, value };
        let d = |flight, level| VariableKey::DepartureDelay { flight, level };
        let mut bits = vec![false; 8];
        for k in [d(0, 1), key(0, 1), d(1, 0), key(1, 0)] {
            bits[model.form.index_of(&k).unwrap()] = true;
        }
        assert_eq!(model.energy(&bits), 1.0);
        let decoded = model.decode(&bits);
        assert!(decoded.feasible());
        assert_eq!(decoded.total_delay, Some(1));

        bits[model.form.index_of(&key(0, 1)).unwrap()] = false;
        bits[model.form.index_of(&key(0, 0)).unwrap()] = true;
        let decoded = model.decode(&bits);
        assert!(!decoded.consistency_ok);
        assert_eq!(decoded.violated_conflicts, vec![0]);
    }
}
