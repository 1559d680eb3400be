//! Helpers for driving the `deconflict` binary on fixture files.
#![allow(dead_code)]

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use deconflict::trajectory::{write_trajectories, FlightSet, Trajectory, TrajectoryPoint};

pub fn deconflict(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deconflict"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub fn write_flights(dir: &Path, name: &str, flights: &FlightSet) -> PathBuf {
    let path = dir.join(name);
    write_trajectories(flights, File::create(&path).unwrap()).unwrap();
    path
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Trajectory holding `position` for `minutes` samples from `start`.
pub fn hover(id: &str, start: i64, minutes: usize, position: (f64, f64)) -> Trajectory {
    let p = TrajectoryPoint::new(position.0, position.1, 35000.0).unwrap();
    Trajectory::new(id, start, vec![p; minutes]).unwrap()
}

/// Two flights sharing one position for three minutes.
pub fn head_on_pair() -> FlightSet {
    FlightSet::new(vec![hover("A", 0, 3, (10.0, 10.0)), hover("B", 0, 3, (10.0, 10.0))]).unwrap()
}

/// Point pairs (10, 10) and (11, 10); with a temporal minimum of 2 minutes
/// the forbidden interval is [-2, 1].
pub fn interval_pair() -> FlightSet {
    FlightSet::new(vec![hover("A", 10, 2, (20.0, 20.0)), hover("B", 10, 1, (20.0, 20.0))]).unwrap()
}
