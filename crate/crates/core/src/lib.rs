//! Flight de-confliction as quadratic unconstrained binary optimization.
//!
//! The pipeline runs from time-discretized trajectories ([`trajectory`])
//! through conflict detection ([`conflict`]) and conflict-graph decomposition
//! ([`graph`]) to QUBO compilation under several delay/maneuver models
//! ([`qubo`]) and exact or annealing-based solving ([`solve`]).
//!
//! Quadratic forms, Ising models and solvers are generic over the
//! [`Scalar`] type; the aliases below fix it to `f64`.

mod dsu;

pub mod conflict;
pub mod graph;
pub mod qubo;
pub mod scalar;
pub mod solve;
pub mod stats;
pub mod trajectory;

pub use conflict::{Conflict, ConflictSet, DelayInterval, PointPair, SeparationParams};
pub use graph::{ConflictGraph, Instance};
pub use scalar::Scalar;
pub use trajectory::{FlightSet, Trajectory, TrajectoryPoint};

pub type Qubo = qubo::BinaryQuadraticForm<f64>;
pub type Ising = qubo::IsingForm<f64>;
pub type QuboModel = qubo::QuboModel<f64>;
pub type SolveResult = solve::SolveResult<f64>;
pub type Qubo32 = qubo::BinaryQuadraticForm<f32>;
pub type Ising32 = qubo::IsingForm<f32>;
