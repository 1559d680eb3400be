use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::GraphError;
use crate::conflict::{Conflict, ConflictSet};

/// One connected component of the conflict graph: its flights, their
/// conflicts and the maximum delay the conflicts were detected with.
///
/// Flights and conflicts are addressed by local indices: flights in id
/// order, conflicts in id order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRecord", into = "InstanceRecord")]
pub struct Instance {
    flights: Vec<String>,
    conflicts: ConflictSet,
    d_max: i64,
    endpoints: Vec<(usize, usize)>,
    order: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRecord {
    flights: Vec<String>,
    d_max: i64,
    conflicts: ConflictSet,
}

impl TryFrom<InstanceRecord> for Instance {
    type Error = GraphError;

    fn try_from(r: InstanceRecord) -> Result<Self, GraphError> {
        Instance::new(r.flights, r.conflicts, r.d_max)
    }
}

impl From<Instance> for InstanceRecord {
    fn from(i: Instance) -> Self {
        Self {
            flights: i.flights,
            d_max: i.d_max,
            conflicts: i.conflicts,
        }
    }
}

impl Instance {
    pub fn new(mut flights: Vec<String>, conflicts: ConflictSet, d_max: i64) -> Result<Self, GraphError> {
        flights.sort();
        flights.dedup();
        let local = |conflict: usize, id: &str| {
            flights.binary_search_by(|f| f.as_str().cmp(id)).map_err(|_| GraphError::UnknownFlight {
                conflict,
                flight: id.to_owned(),
            })
        };
        let mut endpoints = Vec::with_capacity(conflicts.len());
        for c in conflicts.conflicts() {
            endpoints.push((local(c.id(), c.first())?, local(c.id(), c.second())?));
        }
        let position = |id: usize| {
            conflicts
                .conflicts()
                .binary_search_by_key(&id, Conflict::id)
                .expect("conflict of this set")
        };
        let order = flights
            .iter()
            .map(|f| conflicts.flight_conflicts(f).iter().map(|&id| position(id)).collect())
            .collect();
        Ok(Self {
            flights,
            conflicts,
            d_max,
            endpoints,
            order,
        })
    }

    /// Instance over exactly the flights appearing in `conflicts`.
    pub fn from_conflicts(conflicts: Vec<Conflict>, d_max: i64) -> Result<Self, GraphError> {
        let flights: BTreeSet<String> = conflicts
            .iter()
            .flat_map(|c| [c.first().to_owned(), c.second().to_owned()])
            .collect();
        let set = ConflictSet::new(conflicts)?;
        Self::new(flights.into_iter().collect(), set, d_max)
    }

    pub fn flights(&self) -> &[String] {
        &self.flights
    }

    pub fn num_flights(&self) -> usize {
        self.flights.len()
    }

    pub fn conflict_set(&self) -> &ConflictSet {
        &self.conflicts
    }

    pub fn conflicts(&self) -> &[Conflict] {
        self.conflicts.conflicts()
    }

    pub fn num_conflicts(&self) -> usize {
        self.conflicts.len()
    }

    pub fn d_max(&self) -> i64 {
        self.d_max
    }

    /// Local `(first, second)` flight indices of conflict `k`.
    pub fn endpoints(&self, k: usize) -> (usize, usize) {
        self.endpoints[k]
    }

    /// Conflicts of flight `i` in the order the flight reaches them.
    pub fn flight_conflicts(&self, i: usize) -> &[usize] {
        &self.order[i]
    }

    /// Conflicts flight `i` passes strictly before reaching conflict `k`.
    pub fn upstream(&self, i: usize, k: usize) -> &[usize] {
        let order = &self.order[i];
        let at = order.iter().position(|&c| c == k).expect("flight takes part in conflict");
        &order[..at]
    }

    /// The conflict flight `i` passes just before `k`, if any.
    pub fn previous_conflict(&self, i: usize, k: usize) -> Option<usize> {
        self.upstream(i, k).last().copied()
    }

    /// True if every conflict is already avoided with all delays zero.
    pub fn is_trivial(&self) -> bool {
        self.conflicts().iter().all(|c| c.is_avoided(0, 0))
    }

    /// Whether per-flight delays avoid every conflict.
    pub fn delays_feasible(&self, delays: &[i64]) -> bool {
        self.conflicts()
            .iter()
            .zip(&self.endpoints)
            .all(|(c, &(i, j))| c.is_avoided(delays[i], delays[j]))
    }
}
