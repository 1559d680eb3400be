use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geo::{haversine_nm, interpolate};
use super::{FlightSet, Trajectory, TrajectoryError, TrajectoryPoint};

/// Latitude/longitude rectangle in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoBox {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl GeoBox {
    fn validate(&self, name: &str) -> Result<(), TrajectoryError> {
        let ok = self.lat_min <= self.lat_max
            && self.lon_min <= self.lon_max
            && (-90.0..=90.0).contains(&self.lat_min)
            && (-90.0..=90.0).contains(&self.lat_max)
            && (-180.0..180.0).contains(&self.lon_min)
            && (-180.0..180.0).contains(&self.lon_max);
        if ok {
            Ok(())
        } else {
            Err(TrajectoryError::InvalidConfig(format!("{name} box {self:?} is not a valid region")))
        }
    }

    fn has_zero_extent(&self) -> bool {
        self.lat_min == self.lat_max && self.lon_min == self.lon_max
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        (uniform(rng, self.lat_min, self.lat_max), uniform(rng, self.lon_min, self.lon_max))
    }
}

/// Parameters of the seeded corridor generator.
///
/// Every flight flies a great circle from a point in `origin` to a point in
/// `destination` at constant speed and constant altitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub flights: usize,
    pub origin: GeoBox,
    pub destination: GeoBox,
    pub min_speed_knots: f64,
    pub max_speed_knots: f64,
    pub altitude_levels_ft: Vec<f64>,
    /// Earliest departure, minutes since midnight UTC.
    pub first_departure_min: i64,
    /// Departures are drawn uniformly from `first_departure_min ..= first_departure_min + window`.
    pub departure_window_min: i64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            flights: 100,
            origin: GeoBox {
                lat_min: 40.0,
                lat_max: 42.0,
                lon_min: -60.0,
                lon_max: -58.0,
            },
            destination: GeoBox {
                lat_min: 48.0,
                lat_max: 50.0,
                lon_min: -30.0,
                lon_max: -28.0,
            },
            min_speed_knots: 440.0,
            max_speed_knots: 500.0,
            altitude_levels_ft: vec![35000.0, 37000.0],
            first_departure_min: 600,
            departure_window_min: 120,
            seed: 1,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<(), TrajectoryError> {
        self.origin.validate("origin")?;
        self.destination.validate("destination")?;
        if self.origin == self.destination && self.origin.has_zero_extent() {
            return Err(TrajectoryError::DegenerateCorridor);
        }
        if !(self.min_speed_knots > 0.0 && self.min_speed_knots <= self.max_speed_knots)
            || !self.max_speed_knots.is_finite()
        {
            return Err(TrajectoryError::InvalidConfig(format!(
                "speed range [{}, {}] must be positive and ordered",
                self.min_speed_knots, self.max_speed_knots
            )));
        }
        if self.altitude_levels_ft.is_empty()
            || self.altitude_levels_ft.iter().any(|a| !a.is_finite() || *a < 0.0)
        {
            return Err(TrajectoryError::InvalidConfig(
                "at least one non-negative altitude level is required".into(),
            ));
        }
        if self.departure_window_min < 0 {
            return Err(TrajectoryError::InvalidConfig("departure window must be non-negative".into()));
        }
        Ok(())
    }
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// Generates a reproducible flight set along the configured corridor.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<FlightSet, TrajectoryError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = (config.flights.max(1) - 1).to_string().len().max(4);
    let mut flights = Vec::with_capacity(config.flights);
    for n in 0..config.flights {
        let from = config.origin.sample(&mut rng);
        let to = config.destination.sample(&mut rng);
        let speed = uniform(&mut rng, config.min_speed_knots, config.max_speed_knots);
        let altitude = config.altitude_levels_ft[rng.gen_range(0..config.altitude_levels_ft.len())];
        let departure = config.first_departure_min + rng.gen_range(0..=config.departure_window_min);

        let distance = haversine_nm(from.0, from.1, to.0, to.1);
        let step = speed / 60.0;
        let steps = (distance / step).ceil() as usize;
        let mut points = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            let fraction = if distance > 0.0 {
                (k as f64 * step / distance).min(1.0)
            } else {
                0.0
            };
            let (lat, lon) = interpolate(from, to, fraction);
            points.push(TrajectoryPoint::new(lat, lon, altitude)?);
        }
        flights.push(Trajectory::new(format!("SYN{n:0width$}"), departure, points)?);
    }
    FlightSet::new(flights)
}
