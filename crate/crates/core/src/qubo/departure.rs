//! Departure-delay-only model: one-hot delay levels per flight, a linear
//! delay cost, and pairwise penalties on level combinations whose delay
//! difference falls inside a conflict's forbidden interval.

use super::{
    add_departure_delay_cost, decode_departures, departure_groups, BinaryQuadraticForm, DecodedSolution,
    Discretization, ModelSpec, PenaltyWeights, QuboError, QuboModel,
};
use crate::graph::Instance;
use crate::scalar::Scalar;

pub fn build_departure_qubo<T: Scalar>(
    instance: &Instance,
    disc: &Discretization,
    weights: &PenaltyWeights<T>,
) -> Result<QuboModel<T>, QuboError> {
    disc.check_against(instance)?;
    weights.validate()?;
    let mut form = BinaryQuadraticForm::new();
    let groups = departure_groups(&mut form, instance.num_flights(), disc);
    form.add_encoding_penalty(&groups, weights.encoding)?;
    add_departure_delay_cost(&mut form, &groups, disc);
    for (k, c) in instance.conflicts().iter().enumerate() {
        let (i, j) = instance.endpoints(k);
        let forbidden = c.forbidden_interval();
        for (l, &x) in groups[i].iter().enumerate() {
            for (m, &y) in groups[j].iter().enumerate() {
                if forbidden.contains(disc.delay(l) - disc.delay(m)) {
                    form.add_quadratic(x, y, weights.conflict);
                }
            }
        }
    }
    Ok(QuboModel {
        form,
        spec: ModelSpec::Departure {
            instance: instance.clone(),
            disc: *disc,
        },
    })
}

pub(super) fn decode<T: Scalar>(
    form: &BinaryQuadraticForm<T>,
    instance: &Instance,
    disc: &Discretization,
    bits: &[bool],
) -> DecodedSolution {
    let delays = decode_departures(form, instance.num_flights(), disc, bits);
    let encoding_ok = delays.iter().all(Option::is_some);
    let violated_conflicts = instance
        .conflicts()
        .iter()
        .enumerate()
        .filter(|(k, c)| {
            let (i, j) = instance.endpoints(*k);
            matches!((delays[i], delays[j]), (Some(a), Some(b)) if !c.is_avoided(a, b))
        })
        .map(|(k, _)| k)
        .collect();
    let total_delay = delays.iter().copied().sum::<Option<i64>>();
    DecodedSolution {
        delays,
        encoding_ok,
        consistency_ok: true,
        violated_conflicts,
        total_delay,
        ..Default::default()
    }
}
