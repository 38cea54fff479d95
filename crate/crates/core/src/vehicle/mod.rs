//! Aircraft assembly: configuration, controls, state layout and the full
//! residual.

pub mod assembly;
pub mod config;
pub mod controls;
pub mod state;

pub use assembly::{total_loads, Evaluation, MassMatrix, Residual, TotalLoads, Vehicle};
pub use config::{ConfigFile, VehicleConfig};
pub use controls::{ChannelRange, ControlVector, Rigging};
pub use state::{SystemState, N_CONTROLS, N_STATES, STATE_NAMES, STATE_UNITS};
