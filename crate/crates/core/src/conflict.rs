//! Potential-conflict detection between trajectory points, clustering into
//! conflicts, and the forbidden delay-difference interval of each conflict.

use std::collections::{BTreeMap, HashMap};

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::DisjointSet;
use crate::trajectory::geo::{great_circle_nm, nm_per_degree};
use crate::trajectory::{FlightSet, Trajectory};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ConflictError {
    #[error("separation parameters must be strictly positive")]
    InvalidSeparation,
    #[error("conflict {0} has no point pairs")]
    EmptyConflict(usize),
    #[error("conflict {id}: flights must be ordered and distinct, got ({first}, {second})")]
    FlightOrder { id: usize, first: String, second: String },
    #[error("duplicate conflict id {0}")]
    DuplicateId(usize),
}

/// Separation standards: horizontal distance, temporal separation and the
/// altitude difference at or above which points never conflict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationParams {
    pub horizontal_nm: f64,
    pub temporal_min: i64,
    pub vertical_ft: f64,
}

impl Default for SeparationParams {
    fn default() -> Self {
        Self {
            horizontal_nm: 30.0,
            temporal_min: 3,
            vertical_ft: 2000.0,
        }
    }
}

impl SeparationParams {
    pub fn new(horizontal_nm: f64, temporal_min: i64, vertical_ft: f64) -> Result<Self, ConflictError> {
        let p = Self {
            horizontal_nm,
            temporal_min,
            vertical_ft,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ConflictError> {
        if self.horizontal_nm > 0.0 && self.temporal_min > 0 && self.vertical_ft > 0.0 {
            Ok(())
        } else {
            Err(ConflictError::InvalidSeparation)
        }
    }
}

/// Minute `s` on the first flight paired with minute `t` on the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct PointPair {
    pub s: i64,
    pub t: i64,
}

impl PointPair {
    pub fn new(s: i64, t: i64) -> Self {
        Self { s, t }
    }

    pub fn transpose(self) -> Self {
        Self { s: self.t, t: self.s }
    }
}

impl From<[i64; 2]> for PointPair {
    fn from([s, t]: [i64; 2]) -> Self {
        Self { s, t }
    }
}

impl From<PointPair> for [i64; 2] {
    fn from(p: PointPair) -> Self {
        [p.s, p.t]
    }
}

/// Closed integer interval of forbidden delay differences `D_first - D_second`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayInterval {
    pub min: i64,
    pub max: i64,
}

impl DelayInterval {
    pub fn contains(&self, difference: i64) -> bool {
        self.min <= difference && difference <= self.max
    }

    pub fn values(&self) -> impl Iterator<Item = i64> {
        self.min..=self.max
    }
}

/// A cluster of potentially conflicting point pairs between two flights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConflictRecord", into = "ConflictRecord")]
pub struct Conflict {
    id: usize,
    first: String,
    second: String,
    pairs: Vec<PointPair>,
    interval: DelayInterval,
}

#[derive(Serialize, Deserialize)]
struct ConflictRecord {
    k: usize,
    i: String,
    j: String,
    pairs: Vec<PointPair>,
    dmin: i64,
    dmax: i64,
}

impl TryFrom<ConflictRecord> for Conflict {
    type Error = ConflictError;

    fn try_from(r: ConflictRecord) -> Result<Self, Self::Error> {
        if r.pairs.is_empty() {
            return Err(ConflictError::EmptyConflict(r.k));
        }
        if r.i >= r.j {
            return Err(ConflictError::FlightOrder {
                id: r.k,
                first: r.i,
                second: r.j,
            });
        }
        let mut pairs = r.pairs;
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self {
            id: r.k,
            first: r.i,
            second: r.j,
            pairs,
            interval: DelayInterval { min: r.dmin, max: r.dmax },
        })
    }
}

impl From<Conflict> for ConflictRecord {
    fn from(c: Conflict) -> Self {
        Self {
            k: c.id,
            i: c.first,
            j: c.second,
            pairs: c.pairs,
            dmin: c.interval.min,
            dmax: c.interval.max,
        }
    }
}

impl Conflict {
    /// Builds a conflict from its point pairs; `first` must order before `second`.
    pub fn new(
        id: usize,
        first: impl Into<String>,
        second: impl Into<String>,
        mut pairs: Vec<PointPair>,
        temporal_min: i64,
    ) -> Result<Self, ConflictError> {
        let (first, second) = (first.into(), second.into());
        if pairs.is_empty() {
            return Err(ConflictError::EmptyConflict(id));
        }
        if first >= second {
            return Err(ConflictError::FlightOrder { id, first, second });
        }
        pairs.sort_unstable();
        pairs.dedup();
        let lo = pairs.iter().map(|p| p.t - p.s).min().expect("non-empty");
        let hi = pairs.iter().map(|p| p.t - p.s).max().expect("non-empty");
        Ok(Self {
            id,
            first,
            second,
            pairs,
            interval: DelayInterval {
                min: 1 - temporal_min + lo,
                max: temporal_min - 1 + hi,
            },
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn first(&self) -> &str {
        &self.first
    }

    pub fn second(&self) -> &str {
        &self.second
    }

    pub fn involves(&self, flight_id: &str) -> bool {
        self.first == flight_id || self.second == flight_id
    }

    pub fn pairs(&self) -> &[PointPair] {
        &self.pairs
    }

    /// Forbidden interval of `D_first - D_second`.
    pub fn forbidden_interval(&self) -> DelayInterval {
        self.interval
    }

    /// Whether accumulated delays `(d_first, d_second)` at this conflict keep
    /// the flights separated.
    pub fn is_avoided(&self, d_first: i64, d_second: i64) -> bool {
        !self.interval.contains(d_first - d_second)
    }

    /// Minute at which `flight_id` first enters the conflict zone.
    pub fn entry_time(&self, flight_id: &str) -> Option<i64> {
        if flight_id == self.first {
            self.pairs.iter().map(|p| p.s).min()
        } else if flight_id == self.second {
            self.pairs.iter().map(|p| p.t).min()
        } else {
            None
        }
    }

    /// Checks that every minute between two pairs of the cluster is matched
    /// by a pair lying between them on the other flight, in both directions.
    pub fn satisfies_projection(&self) -> bool {
        let pairs = &self.pairs;
        let contains = |s: i64, t: i64| pairs.binary_search(&PointPair { s, t }).is_ok();
        for (n, a) in pairs.iter().enumerate() {
            for b in &pairs[n + 1..] {
                let (s_lo, s_hi) = (a.s.min(b.s), a.s.max(b.s));
                let (t_lo, t_hi) = (a.t.min(b.t), a.t.max(b.t));
                let rows = (s_lo..=s_hi).all(|s| (t_lo..=t_hi).any(|t| contains(s, t)));
                let cols = (t_lo..=t_hi).all(|t| (s_lo..=s_hi).any(|s| contains(s, t)));
                if !(rows && cols) {
                    return false;
                }
            }
        }
        true
    }

    fn sort_key(&self) -> (&str, &str, i64, i64) {
        let first = self.pairs[0];
        let min_t = self.pairs.iter().map(|p| p.t).min().expect("non-empty");
        (&self.first, &self.second, first.s, min_t)
    }
}

/// Conflicts keyed by id, plus each flight's conflicts in the order the
/// flight reaches them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConflictSet {
    conflicts: Vec<Conflict>,
    per_flight: BTreeMap<String, Vec<usize>>,
}

impl ConflictSet {
    pub fn new(mut conflicts: Vec<Conflict>) -> Result<Self, ConflictError> {
        conflicts.sort_by_key(|c| c.id);
        if let Some(w) = conflicts.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(ConflictError::DuplicateId(w[0].id));
        }
        let mut arrivals: BTreeMap<String, Vec<(i64, usize)>> = BTreeMap::new();
        for c in &conflicts {
            for flight in [&c.first, &c.second] {
                let entry = c.entry_time(flight).expect("flight belongs to conflict");
                arrivals.entry(flight.clone()).or_default().push((entry, c.id));
            }
        }
        let per_flight = arrivals
            .into_iter()
            .map(|(flight, mut list)| {
                list.sort_unstable();
                (flight, list.into_iter().map(|(_, id)| id).collect())
            })
            .collect();
        Ok(Self { conflicts, per_flight })
    }

    pub fn conflicts(&self) -> &[Conflict] {
        &self.conflicts
    }

    pub fn len(&self) -> usize {
        self.conflicts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Conflict> {
        self.conflicts
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|n| &self.conflicts[n])
    }

    /// Conflict ids of `flight_id` in temporal order (empty if none).
    pub fn flight_conflicts(&self, flight_id: &str) -> &[usize] {
        self.per_flight.get(flight_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn flights(&self) -> impl Iterator<Item = &str> + '_ {
        self.per_flight.keys().map(String::as_str)
    }

    /// Subset of conflicts whose flights both satisfy `keep`.
    pub fn restrict<F: Fn(&str) -> bool>(&self, keep: F) -> Self {
        let kept = self
            .conflicts
            .iter()
            .filter(|c| keep(&c.first) && keep(&c.second))
            .cloned()
            .collect();
        Self::new(kept).expect("subset of a valid set")
    }

    pub fn total_pairs(&self) -> usize {
        self.conflicts.iter().map(|c| c.pairs.len()).sum()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&self.conflicts)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let conflicts: Vec<Conflict> = serde_json::from_str(text)?;
        Self::new(conflicts).map_err(serde::de::Error::custom)
    }
}

impl Serialize for ConflictSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.conflicts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConflictSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let conflicts = Vec::<Conflict>::deserialize(deserializer)?;
        Self::new(conflicts).map_err(serde::de::Error::custom)
    }
}

/// All point pairs `(s, t)` of flights `a` and `b` that are spatially in
/// conflict and temporally reachable when both delays are bounded by `d_max`.
pub fn detect_potential_pairs(
    a: &Trajectory,
    b: &Trajectory,
    params: &SeparationParams,
    d_max: i64,
) -> Vec<PointPair> {
    // |s - t| < window
    let window = d_max + params.temporal_min;
    let mut out = Vec::new();
    if window <= 0 || a.arrival() + window <= b.departure() || b.arrival() + window <= a.departure() {
        return out;
    }
    let lat_gap = params.horizontal_nm / nm_per_degree() * (1.0 + 1e-9);
    if bounding_latitudes(a).1 + lat_gap < bounding_latitudes(b).0
        || bounding_latitudes(b).1 + lat_gap < bounding_latitudes(a).0
    {
        return out;
    }
    for (s, p) in a.samples() {
        let t_lo = b.departure().max(s - window + 1);
        let t_hi = b.arrival().min(s + window - 1);
        for t in t_lo..=t_hi {
            let q = b.point_at(t).expect("t within trajectory");
            if (p.altitude - q.altitude).abs() >= params.vertical_ft {
                continue;
            }
            // haversine distance is bounded below by the meridional arc
            if (p.latitude - q.latitude).abs() > lat_gap {
                continue;
            }
            if great_circle_nm(p, q) < params.horizontal_nm {
                out.push(PointPair { s, t });
            }
        }
    }
    out
}

fn bounding_latitudes(f: &Trajectory) -> (f64, f64) {
    f.points().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.latitude), hi.max(p.latitude))
    })
}

/// Splits the pairs of one flight pair into clusters connected under
/// king-move adjacency on the `(s, t)` grid. Ids are left at zero.
pub fn cluster_conflicts(
    pairs: &[PointPair],
    first: &str,
    second: &str,
    params: &SeparationParams,
) -> Vec<Conflict> {
    let index: HashMap<PointPair, usize> = pairs.iter().enumerate().map(|(n, p)| (*p, n)).collect();
    let mut dsu = DisjointSet::new(pairs.len());
    for (n, p) in pairs.iter().enumerate() {
        for (ds, dt) in [(0, 1), (1, -1), (1, 0), (1, 1)] {
            if let Some(&m) = index.get(&PointPair::new(p.s + ds, p.t + dt)) {
                dsu.union(n, m);
            }
        }
    }
    let mut clusters: Vec<Conflict> = dsu
        .groups()
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| {
            let members = g.into_iter().map(|n| pairs[n]).collect();
            Conflict::new(0, first, second, members, params.temporal_min).expect("validated flight order")
        })
        .collect();
    clusters.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    if log::log_enabled!(log::Level::Debug) {
        for c in clusters.iter().filter(|c| c.pairs.len() <= 256) {
            if !c.satisfies_projection() {
                debug!(
                    "cluster {first}/{second} at s={} violates the projection condition",
                    c.pairs[0].s
                );
            }
        }
    }
    clusters
}

/// Detects and clusters conflicts over all flight pairs; ids follow
/// `(first, second, entry minute)` order.
pub fn detect_all(flights: &FlightSet, params: &SeparationParams, d_max: i64) -> ConflictSet {
    let list = flights.flights();
    let flight_pairs: Vec<(usize, usize)> = (0..list.len())
        .flat_map(|i| (i + 1..list.len()).map(move |j| (i, j)))
        .collect();
    let found: Vec<Vec<Conflict>> = flight_pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&list[i], &list[j]);
            let pairs = detect_potential_pairs(a, b, params, d_max);
            if pairs.is_empty() {
                Vec::new()
            } else {
                cluster_conflicts(&pairs, a.flight_id(), b.flight_id(), params)
            }
        })
        .collect();
    let conflicts = found
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(id, mut c)| {
            c.id = id;
            c
        })
        .collect();
    ConflictSet::new(conflicts).expect("sequential ids")
}
