//! Flexible avoidance: each flight may maneuver at a conflict, but a conflict
//! whose accumulated delay difference already lies outside its forbidden
//! interval needs no maneuver at all.

use super::{
    add_departure_delay_cost, decode_departures, departure_groups, one_hot, BinaryQuadraticForm, DecodedSolution,
    Discretization, FlightConflictTable, ModelSpec, PenaltyWeights, QuboError, QuboModel, VariableKey,
};
use crate::graph::Instance;
use crate::scalar::Scalar;

/// Values `γ` that `D_first - D_second` can take at conflict `k`.
fn gamma_grid(
    instance: &Instance,
    maneuvers: &FlightConflictTable,
    disc: &Discretization,
    k: usize,
) -> Result<Vec<i64>, QuboError> {
    let (i, j) = instance.endpoints(k);
    let step = disc.step();
    let mut reach = 0;
    for f in [i, j] {
        let mut upstream = 0;
        for &k2 in instance.upstream(f, k) {
            let d = maneuvers.require("maneuver delay", f, k2)?;
            if d % step != 0 {
                return Err(QuboError::GammaGrid {
                    conflict: k,
                    difference: d,
                    step,
                });
            }
            upstream += d;
        }
        reach = reach.max(upstream);
    }
    let top = (disc.d_max() + reach) / step;
    Ok((-top..=top).map(|g| g * step).collect())
}

/// Terms of the accumulated delay `D_{f,k}` of flight `f` on arrival at `k`.
fn accumulated_terms<T: Scalar>(
    form: &BinaryQuadraticForm<T>,
    instance: &Instance,
    maneuvers: &FlightConflictTable,
    departure: &[usize],
    disc: &Discretization,
    f: usize,
    k: usize,
) -> Result<Vec<(usize, i64)>, QuboError> {
    let mut terms: Vec<(usize, i64)> = departure
        .iter()
        .enumerate()
        .map(|(level, &x)| (x, disc.delay(level)))
        .collect();
    for &k2 in instance.upstream(f, k) {
        let a = form
            .index_of(&VariableKey::Maneuver { conflict: k2, flight: f })
            .expect("maneuver bit");
        terms.push((a, maneuvers.require("maneuver delay", f, k2)?));
    }
    Ok(terms)
}

pub fn build_flexible_qubo<T: Scalar>(
    instance: &Instance,
    maneuvers: &FlightConflictTable,
    disc: &Discretization,
    weights: &PenaltyWeights<T>,
    allow_both: bool,
) -> Result<QuboModel<T>, QuboError> {
    disc.check_against(instance)?;
    weights.validate()?;
    let mut form = BinaryQuadraticForm::new();
    let mut groups = departure_groups(&mut form, instance.num_flights(), disc);
    let flights = groups.len();
    add_departure_delay_cost(&mut form, &groups, disc);

    for k in 0..instance.num_conflicts() {
        let (i, j) = instance.endpoints(k);
        for f in [i, j] {
            let a = form.variable(VariableKey::Maneuver { conflict: k, flight: f });
            form.add_linear(a, T::from_int(maneuvers.require("maneuver delay", f, k)?));
        }
    }

    for (k, conflict) in instance.conflicts().iter().enumerate() {
        let (i, j) = instance.endpoints(k);
        let grid = gamma_grid(instance, maneuvers, disc, k)?;
        let diff: Vec<usize> = grid
            .iter()
            .map(|&value| form.variable(VariableKey::DelayDiff { conflict: k, value }))
            .collect();

        let mut terms: Vec<(usize, T)> = Vec::new();
        for (x, c) in accumulated_terms(&form, instance, maneuvers, &groups[i], disc, i, k)? {
            terms.push((x, T::from_int(c)));
        }
        for (x, c) in accumulated_terms(&form, instance, maneuvers, &groups[j], disc, j, k)? {
            terms.push((x, T::from_int(-c)));
        }
        for (&x, &g) in diff.iter().zip(&grid) {
            terms.push((x, T::from_int(-g)));
        }
        form.add_squared(&terms, T::zero(), weights.consistency);

        let a_i = form.index_of(&VariableKey::Maneuver { conflict: k, flight: i }).expect("maneuver bit");
        let a_j = form.index_of(&VariableKey::Maneuver { conflict: k, flight: j }).expect("maneuver bit");
        let forbidden = conflict.forbidden_interval();
        let blocked: Vec<usize> = diff
            .iter()
            .zip(&grid)
            .filter(|(_, &g)| forbidden.contains(g))
            .map(|(&x, _)| x)
            .collect();
        if allow_both {
            let z = form.variable(VariableKey::Ancilla { conflict: k });
            form.add_or_gadget(a_i, a_j, z, weights.consistency);
            for &x in &blocked {
                form.add_linear(x, weights.conflict);
                form.add_quadratic(x, z, -weights.conflict);
            }
        } else {
            for &x in &blocked {
                form.add_linear(x, weights.conflict);
                form.add_quadratic(x, a_i, -weights.conflict);
                form.add_quadratic(x, a_j, -weights.conflict);
                form.add_quadratic(a_i, a_j, weights.conflict * T::lit(2.0));
            }
        }
        groups.push(diff);
    }
    debug_assert!(groups.len() == flights + instance.num_conflicts());
    form.add_encoding_penalty(&groups, weights.encoding)?;

    Ok(QuboModel {
        form,
        spec: ModelSpec::Flexible {
            instance: instance.clone(),
            disc: *disc,
            maneuvers: maneuvers.clone(),
            allow_both,
        },
    })
}

pub(super) fn decode<T: Scalar>(
    form: &BinaryQuadraticForm<T>,
    instance: &Instance,
    disc: &Discretization,
    maneuvers: &FlightConflictTable,
    allow_both: bool,
    bits: &[bool],
) -> DecodedSolution {
    let delays = decode_departures(form, instance.num_flights(), disc, bits);
    let bit = |key: VariableKey| bits[form.index_of(&key).expect("declared variable")];
    let active = |k: usize, flight: usize| bit(VariableKey::Maneuver { conflict: k, flight });

    let mut chosen = Vec::new();
    let mut maneuver_delay = 0;
    for k in 0..instance.num_conflicts() {
        let (i, j) = instance.endpoints(k);
        for f in [i, j] {
            if active(k, f) {
                chosen.push((k, f));
                maneuver_delay += maneuvers.get(f, k).unwrap_or(0);
            }
        }
    }

    let mut accumulated = std::collections::BTreeMap::new();
    for (f, delay) in delays.iter().enumerate() {
        for &k in instance.flight_conflicts(f) {
            let upstream: i64 = instance
                .upstream(f, k)
                .iter()
                .filter(|&&k2| active(k2, f))
                .map(|&k2| maneuvers.get(f, k2).unwrap_or(0))
                .sum();
            accumulated.insert((f, k), delay.map(|d| d + upstream));
        }
    }

    let mut encoding_ok = delays.iter().all(Option::is_some);
    let mut consistency_ok = true;
    let mut violated = Vec::new();
    for (k, conflict) in instance.conflicts().iter().enumerate() {
        let (i, j) = instance.endpoints(k);
        let grid: Vec<(usize, i64)> = form
            .keys()
            .iter()
            .enumerate()
            .filter_map(|(x, key)| match *key {
                VariableKey::DelayDiff { conflict, value } if conflict == k => Some((x, value)),
                _ => None,
            })
            .collect();
        let encoded = one_hot(grid.iter().copied(), bits);
        encoding_ok &= encoded.is_some();
        let actual = match (accumulated[&(i, k)], accumulated[&(j, k)]) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        };
        if encoded.is_some() && actual.is_some() && encoded != actual {
            consistency_ok = false;
        }
        let (a_i, a_j) = (active(k, i), active(k, j));
        if allow_both {
            consistency_ok &= bit(VariableKey::Ancilla { conflict: k }) == (a_i || a_j);
        }
        let forbidden = conflict.forbidden_interval();
        let exposed = !a_i && !a_j && actual.is_some_and(|d| forbidden.contains(d));
        let doubled = !allow_both && a_i && a_j && grid.iter().any(|&(_, g)| forbidden.contains(g));
        if exposed || doubled {
            violated.push(k);
        }
    }

    let total_delay = delays.iter().copied().sum::<Option<i64>>().map(|d| d + maneuver_delay);
    DecodedSolution {
        delays,
        maneuvers: chosen,
        accumulated,
        encoding_ok,
        consistency_ok,
        violated_conflicts: violated,
        total_delay,
        ..Default::default()
    }
}
