//! Deterministic 6-DOF quadrotor flight-dynamics simulator with a
//! fault-tolerant super-twisting sliding mode controller and control
//! allocation, plus a scenario runner and response-metrics analyzer.

pub mod allocation;
pub mod analysis;
pub mod controller;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod metrics;
pub mod model;
pub mod reference;
pub mod scenario;
pub mod sim;
pub mod telemetry;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
