//! The 25-element state vector and its index map.
//!
//! Order: body velocities, body rates, Euler angles, main-rotor inflow,
//! tail-rotor inflow, flap harmonics and their rates, lag harmonics and
//! their rates. Everything downstream (linear models, gains, logs) refers to
//! states through the constants here.

use nalgebra::SVector;

use crate::fuselage::FuselageState;
use crate::rotor::{InflowState, RotorState};

pub const N_STATES: usize = 25;
pub const N_CONTROLS: usize = 4;

pub type SystemState = SVector<f64, N_STATES>;

pub const U: usize = 0;
pub const V: usize = 1;
pub const W: usize = 2;
pub const P: usize = 3;
pub const Q: usize = 4;
pub const R: usize = 5;
pub const PHI: usize = 6;
pub const THETA: usize = 7;
pub const PSI: usize = 8;
pub const LAMBDA0: usize = 9;
pub const LAMBDA1C: usize = 10;
pub const LAMBDA1S: usize = 11;
pub const LAMBDA_TR: usize = 12;
pub const BETA0: usize = 13;
pub const BETA1C: usize = 14;
pub const BETA1S: usize = 15;
pub const BETA0_DOT: usize = 16;
pub const BETA1C_DOT: usize = 17;
pub const BETA1S_DOT: usize = 18;
pub const ZETA0: usize = 19;
pub const ZETA1C: usize = 20;
pub const ZETA1S: usize = 21;
pub const ZETA0_DOT: usize = 22;
pub const ZETA1C_DOT: usize = 23;
pub const ZETA1S_DOT: usize = 24;

pub const STATE_NAMES: [&str; N_STATES] = [
    "u", "v", "w", "p", "q", "r", "phi", "theta", "psi", "lambda0", "lambda1c", "lambda1s",
    "lambda_tr", "beta0", "beta1c", "beta1s", "beta0_dot", "beta1c_dot", "beta1s_dot", "zeta0",
    "zeta1c", "zeta1s", "zeta0_dot", "zeta1c_dot", "zeta1s_dot",
];

pub const STATE_UNITS: [&str; N_STATES] = [
    "ft/s", "ft/s", "ft/s", "rad/s", "rad/s", "rad/s", "rad", "rad", "rad", "-", "-", "-", "-",
    "rad", "rad", "rad", "rad/s", "rad/s", "rad/s", "rad", "rad", "rad", "rad/s", "rad/s", "rad/s",
];

pub const CONTROL_NAMES: [&str; N_CONTROLS] = ["collective", "lateral", "longitudinal", "pedal"];

/// Residual rows, same order as the states they govern.
pub const RESIDUAL_NAMES: [&str; N_STATES] = [
    "force_x", "force_y", "force_z", "moment_l", "moment_m", "moment_n", "phi_kin", "theta_kin",
    "psi_kin", "inflow0", "inflow1c", "inflow1s", "inflow_tr", "flap0_kin", "flap1c_kin",
    "flap1s_kin", "flap0", "flap1c", "flap1s", "lag0_kin", "lag1c_kin", "lag1s_kin", "lag0",
    "lag1c", "lag1s",
];

pub fn state_index(name: &str) -> Option<usize> {
    STATE_NAMES.iter().position(|n| *n == name)
}

pub fn fuselage_part(y: &SystemState) -> FuselageState {
    FuselageState::from_slice(&y.as_slice()[..9])
}

pub fn inflow_part(y: &SystemState) -> InflowState {
    InflowState::from_array([y[LAMBDA0], y[LAMBDA1C], y[LAMBDA1S]])
}

pub fn rotor_part(y: &SystemState) -> RotorState {
    let take = |i: usize| [y[i], y[i + 1], y[i + 2]];
    RotorState {
        flap: take(BETA0),
        flap_rate: take(BETA0_DOT),
        lag: take(ZETA0),
        lag_rate: take(ZETA0_DOT),
    }
}

/// Builds a state vector from its parts.
pub fn assemble(
    fuselage: &FuselageState,
    inflow: &InflowState,
    tail_inflow: f64,
    rotor: &RotorState,
) -> SystemState {
    let mut y = SystemState::zeros();
    y.as_mut_slice()[..9].copy_from_slice(&fuselage.to_array());
    y.as_mut_slice()[LAMBDA0..LAMBDA0 + 3].copy_from_slice(&inflow.to_array());
    y[LAMBDA_TR] = tail_inflow;
    y.as_mut_slice()[BETA0..BETA0 + 3].copy_from_slice(&rotor.flap);
    y.as_mut_slice()[BETA0_DOT..BETA0_DOT + 3].copy_from_slice(&rotor.flap_rate);
    y.as_mut_slice()[ZETA0..ZETA0 + 3].copy_from_slice(&rotor.lag);
    y.as_mut_slice()[ZETA0_DOT..ZETA0_DOT + 3].copy_from_slice(&rotor.lag_rate);
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_map_consistent() {
        for (i, n) in STATE_NAMES.iter().enumerate() {
            assert_eq!(state_index(n), Some(i));
        }
        assert_eq!(STATE_NAMES[BETA1S_DOT], "beta1s_dot");
        assert_eq!(STATE_NAMES[LAMBDA_TR], "lambda_tr");
    }

    #[test]
    fn parts_round_trip() {
        let y = SystemState::from_fn(|i, _| i as f64 * 0.5 - 3.0);
        let back = assemble(&fuselage_part(&y), &inflow_part(&y), y[LAMBDA_TR], &rotor_part(&y));
        assert_eq!(back, y);
    }
}
