//! Exclusive avoidance: at every conflict exactly one of the two flights
//! maneuvers around the other, paying a fixed delay.

use super::{
    add_departure_delay_cost, decode_departures, departure_groups, BinaryQuadraticForm, DecodedSolution,
    Discretization, FlightConflictTable, ModelSpec, PenaltyWeights, QuboError, QuboModel, VariableKey,
};
use crate::graph::Instance;
use crate::scalar::Scalar;

/// The single bit `a_k` is stored under the first flight of the conflict:
/// set means the first flight maneuvers, clear means the second does.
pub fn build_exclusive_qubo<T: Scalar>(
    instance: &Instance,
    maneuvers: &FlightConflictTable,
    disc: &Discretization,
    weights: &PenaltyWeights<T>,
) -> Result<QuboModel<T>, QuboError> {
    disc.check_against(instance)?;
    weights.validate()?;
    let costs = maneuver_costs(instance, maneuvers)?;
    let mut form = BinaryQuadraticForm::new();
    let groups = departure_groups(&mut form, instance.num_flights(), disc);
    form.add_encoding_penalty(&groups, weights.encoding)?;
    add_departure_delay_cost(&mut form, &groups, disc);
    for (k, &(d_i, d_j)) in costs.iter().enumerate() {
        let (i, _) = instance.endpoints(k);
        let a = form.variable(VariableKey::Maneuver { conflict: k, flight: i });
        // d_i a + d_j (1 - a)
        form.add_linear(a, T::from_int(d_i - d_j));
        form.add_offset(T::from_int(d_j));
    }
    Ok(QuboModel {
        form,
        spec: ModelSpec::Exclusive {
            instance: instance.clone(),
            disc: *disc,
            maneuvers: maneuvers.clone(),
        },
    })
}

fn maneuver_costs(instance: &Instance, maneuvers: &FlightConflictTable) -> Result<Vec<(i64, i64)>, QuboError> {
    (0..instance.num_conflicts())
        .map(|k| {
            let (i, j) = instance.endpoints(k);
            Ok((
                maneuvers.require("maneuver delay", i, k)?,
                maneuvers.require("maneuver delay", j, k)?,
            ))
        })
        .collect()
}

pub(super) fn decode<T: Scalar>(
    form: &BinaryQuadraticForm<T>,
    instance: &Instance,
    disc: &Discretization,
    maneuvers: &FlightConflictTable,
    bits: &[bool],
) -> DecodedSolution {
    let delays = decode_departures(form, instance.num_flights(), disc, bits);
    let encoding_ok = delays.iter().all(Option::is_some);
    let mut chosen = Vec::with_capacity(instance.num_conflicts());
    let mut maneuver_delay = 0;
    for k in 0..instance.num_conflicts() {
        let (i, j) = instance.endpoints(k);
        let a = form.index_of(&VariableKey::Maneuver { conflict: k, flight: i }).expect("maneuver bit");
        let flight = if bits[a] { i } else { j };
        maneuver_delay += maneuvers.get(flight, k).unwrap_or(0);
        chosen.push((k, flight));
    }
    let total_delay = delays.iter().copied().sum::<Option<i64>>().map(|d| d + maneuver_delay);
    DecodedSolution {
        delays,
        maneuvers: chosen,
        encoding_ok,
        consistency_ok: true,
        total_delay,
        ..Default::default()
    }
}
