//! Articulated main rotor: blade-element loads, hinge dynamics and dynamic
//! inflow.

pub mod flap;
pub mod geometry;
pub mod inflow;
pub mod loads;

pub use flap::{flap_residual, lag_residual, natural_frequencies};
pub use geometry::{
    blade_pitch, local_inflow, InflowState, RotorGeometry, RotorState, SwashplateAngles,
};
pub use inflow::{inflow_residual, steady_inflow, wake_skew};
pub use loads::{element_airloads, integrate_rotor_loads, RotorInput, RotorLoads, RotorModel};
