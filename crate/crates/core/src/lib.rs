//! Modular rotorcraft flight dynamics.
//!
//! Component models (articulated main rotor, tail rotor, empennage,
//! fuselage) are assembled into one implicit residual `f(y, y_dot, u) = 0`.
//! On top of that sit a trim solver, a linearizer, an LQR autopilot and a
//! closed-loop ship-landing simulation.

pub mod cli;
pub mod empennage;
pub mod error;
pub mod frames;
pub mod fuselage;
pub mod linmod;
pub mod loads;
pub mod lqr;
pub mod mission;
pub mod rotor;
pub mod tables;
pub mod tail_rotor;
pub mod trim;
pub mod vehicle;

pub use error::{Error, Result};
pub use vehicle::{ControlVector, SystemState, Vehicle, VehicleConfig};
