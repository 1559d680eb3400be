use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{FlightSet, Trajectory, TrajectoryError, TrajectoryPoint};

pub const CSV_HEADER: [&str; 5] = ["flight_id", "time_min", "lat_deg", "lon_deg", "alt_ft"];

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    flight_id: String,
    time_min: i64,
    lat_deg: f64,
    lon_deg: f64,
    alt_ft: f64,
}

/// Reads trajectories from the `flight_id,time_min,lat_deg,lon_deg,alt_ft` CSV format.
///
/// Rows may arrive in any order; each flight's minutes must form a gapless run.
pub fn load_trajectories<R: Read>(source: R) -> Result<FlightSet, TrajectoryError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers().map_err(|e| parse_error(0, e))?.clone();
    if !headers.is_empty() && headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(TrajectoryError::Parse {
            row: 0,
            message: format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()),
        });
    }

    let mut grouped: BTreeMap<String, BTreeMap<i64, TrajectoryPoint>> = BTreeMap::new();
    for (n, record) in reader.deserialize::<Row>().enumerate() {
        let row_number = n + 1;
        let row = record.map_err(|e| parse_error(row_number, e))?;
        let point = TrajectoryPoint::new(row.lat_deg, row.lon_deg, row.alt_ft).map_err(|e| {
            TrajectoryError::Parse {
                row: row_number,
                message: e.to_string(),
            }
        })?;
        let samples = grouped.entry(row.flight_id.clone()).or_default();
        if samples.insert(row.time_min, point).is_some() {
            return Err(TrajectoryError::DuplicateSample {
                flight_id: row.flight_id,
                time: row.time_min,
            });
        }
    }

    let mut flights = Vec::with_capacity(grouped.len());
    for (flight_id, samples) in grouped {
        let departure = *samples.keys().next().expect("non-empty group");
        let mut points = Vec::with_capacity(samples.len());
        for (expected, (time, point)) in (departure..).zip(samples) {
            if time != expected {
                return Err(TrajectoryError::Gap {
                    flight_id,
                    expected,
                    found: time,
                });
            }
            points.push(point);
        }
        flights.push(Trajectory::new(flight_id, departure, points)?);
    }
    FlightSet::new(flights)
}

/// Writes a flight set in the CSV format read by [`load_trajectories`].
pub fn write_trajectories<W: Write>(flights: &FlightSet, sink: W) -> Result<(), TrajectoryError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    writer.write_record(CSV_HEADER).map_err(csv_io)?;
    for f in flights.flights() {
        for (time, p) in f.samples() {
            writer
                .serialize(Row {
                    flight_id: f.flight_id().to_owned(),
                    time_min: time,
                    lat_deg: p.latitude,
                    lon_deg: p.longitude,
                    alt_ft: p.altitude,
                })
                .map_err(csv_io)?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn parse_error(row: usize, e: csv::Error) -> TrajectoryError {
    TrajectoryError::Parse {
        row,
        message: e.to_string(),
    }
}

fn csv_io(e: csv::Error) -> TrajectoryError {
    TrajectoryError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "flight_id,time_min,lat_deg,lon_deg,alt_ft\n";

    #[test]
    fn empty_stream() {
        assert_eq!(load_trajectories("".as_bytes()).unwrap().len(), 0);
        assert_eq!(load_trajectories(HEADER.as_bytes()).unwrap().len(), 0);
    }

    #[test]
    fn minimal_flight() {
        let text = format!("{HEADER}A,601,41.0,-50.5,35000\nA,600,41.0,-50.0,35000\n");
        let fs = load_trajectories(text.as_bytes()).unwrap();
        assert_eq!(fs.len(), 1);
        let a = fs.get("A").unwrap();
        assert_eq!((a.departure(), a.arrival()), (600, 601));
        assert_eq!(a.points()[1].longitude, -50.5);
    }

    #[test]
    fn write_then_load_round_trips() {
        let text = format!("{HEADER}B,5,-1.25,3.5,0\nA,600,41.0,-50.0,35000\nA,601,41.0,-50.5,35000\n");
        let fs = load_trajectories(text.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_trajectories(&fs, &mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap().lines().next(), Some(HEADER.trim_end()));
        assert_eq!(load_trajectories(out.as_slice()).unwrap(), fs);
    }

    #[test]
    fn gap_is_rejected() {
        let text = format!("{HEADER}A,600,41.0,-50.0,35000\nA,602,41.0,-50.5,35000\n");
        assert!(matches!(
            load_trajectories(text.as_bytes()),
            Err(TrajectoryError::Gap { expected: 601, found: 602, .. })
        ));
    }

    #[test]
    fn duplicate_sample_is_rejected() {
        let text = format!("{HEADER}A,600,41.0,-50.0,35000\nA,600,41.0,-50.5,35000\n");
        assert!(matches!(
            load_trajectories(text.as_bytes()),
            Err(TrajectoryError::DuplicateSample { time: 600, .. })
        ));
    }

    #[test]
    fn malformed_rows() {
        let bad_number = format!("{HEADER}A,600,north,-50.0,35000\n");
        assert!(matches!(load_trajectories(bad_number.as_bytes()), Err(TrajectoryError::Parse { row: 1, .. })));
        let out_of_range = format!("{HEADER}A,600,95.0,-50.0,35000\n");
        assert!(matches!(load_trajectories(out_of_range.as_bytes()), Err(TrajectoryError::Parse { .. })));
        let short = format!("{HEADER}A,600,41.0\n");
        assert!(load_trajectories(short.as_bytes()).is_err());
        let wrong_header = "id,t,lat,lon,alt\nA,600,41.0,-50.0,35000\n";
        assert!(load_trajectories(wrong_header.as_bytes()).is_err());
    }
}
