//! Time-discretized flight trajectories: types, CSV ingestion and a seeded
//! synthetic corridor generator.

pub mod geo;
mod io;
mod synthetic;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use geo::{great_circle_nm, haversine_nm, EARTH_RADIUS_NM};
pub use io::{load_trajectories, write_trajectories, CSV_HEADER};
pub use synthetic::{generate_synthetic, GeoBox, SyntheticConfig};

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("malformed row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("flight {flight_id}: minute {expected} missing (next sample at {found})")]
    Gap {
        flight_id: String,
        expected: i64,
        found: i64,
    },
    #[error("flight {flight_id}: duplicate sample at minute {time}")]
    DuplicateSample { flight_id: String, time: i64 },
    #[error("duplicate flight id {0}")]
    DuplicateFlight(String),
    #[error("flight {0} has no points")]
    EmptyTrajectory(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
    #[error("degenerate corridor: origin and destination collapse to the same point")]
    DegenerateCorridor,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A geographic sample: degrees latitude/longitude and altitude in feet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub latitude: f64,
    pub longitude: f64,
    pub altitude: f64,
}

impl TrajectoryPoint {
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Result<Self, TrajectoryError> {
        let p = Self {
            latitude,
            longitude,
            altitude,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), TrajectoryError> {
        if !(self.latitude.is_finite() && self.longitude.is_finite() && self.altitude.is_finite()) {
            return Err(TrajectoryError::InvalidPoint(format!("non-finite coordinate {self:?}")));
        }
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(TrajectoryError::InvalidPoint(format!("latitude {} out of range", self.latitude)));
        }
        if !(-180.0..180.0).contains(&self.longitude) {
            return Err(TrajectoryError::InvalidPoint(format!(
                "longitude {} out of range",
                self.longitude
            )));
        }
        if self.altitude < 0.0 {
            return Err(TrajectoryError::InvalidPoint(format!("negative altitude {}", self.altitude)));
        }
        Ok(())
    }
}

/// A flight path sampled once per minute from `departure` to `arrival()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    flight_id: String,
    departure: i64,
    points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn new(
        flight_id: impl Into<String>,
        departure: i64,
        points: Vec<TrajectoryPoint>,
    ) -> Result<Self, TrajectoryError> {
        let flight_id = flight_id.into();
        if points.is_empty() {
            return Err(TrajectoryError::EmptyTrajectory(flight_id));
        }
        for p in &points {
            p.validate()?;
        }
        Ok(Self {
            flight_id,
            departure,
            points,
        })
    }

    pub fn flight_id(&self) -> &str {
        &self.flight_id
    }

    /// First sampled minute.
    pub fn departure(&self) -> i64 {
        self.departure
    }

    /// Last sampled minute.
    pub fn arrival(&self) -> i64 {
        self.departure + self.points.len() as i64 - 1
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn point_at(&self, minute: i64) -> Option<&TrajectoryPoint> {
        let offset = minute.checked_sub(self.departure)?;
        usize::try_from(offset).ok().and_then(|o| self.points.get(o))
    }

    /// `(minute, point)` pairs in time order.
    pub fn samples(&self) -> impl Iterator<Item = (i64, &TrajectoryPoint)> + '_ {
        self.points
            .iter()
            .enumerate()
            .map(move |(o, p)| (self.departure + o as i64, p))
    }
}

/// Flights ordered by `flight_id`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FlightSet {
    flights: Vec<Trajectory>,
}

impl FlightSet {
    pub fn new(mut flights: Vec<Trajectory>) -> Result<Self, TrajectoryError> {
        flights.sort_by(|a, b| a.flight_id.cmp(&b.flight_id));
        let mut seen = BTreeSet::new();
        for f in &flights {
            if !seen.insert(f.flight_id.as_str()) {
                return Err(TrajectoryError::DuplicateFlight(f.flight_id.clone()));
            }
        }
        Ok(Self { flights })
    }

    pub fn flights(&self) -> &[Trajectory] {
        &self.flights
    }

    pub fn len(&self) -> usize {
        self.flights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flights.is_empty()
    }

    pub fn get(&self, flight_id: &str) -> Option<&Trajectory> {
        self.flights
            .binary_search_by(|f| f.flight_id.as_str().cmp(flight_id))
            .ok()
            .map(|i| &self.flights[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.flights.iter().map(|f| f.flight_id.as_str())
    }
}
