//! Closed-form tail rotor with a one-state inflow model.
//!
//! Thrust acts along `thrust_axis()`: starboard, tilted up by the cant
//! angle. Induced flow through the disk is positive against the thrust.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::loads::{LoadSource, Loads};
use crate::tables::{InterferenceTable, WakeReceiver};

/// Lower bound on the flow speed in the inflow time constant (ft/s).
pub const MIN_FLOW_SPEED: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TailRotorGeometry {
    pub radius: f64,
    pub chord: f64,
    pub omega: f64,
    pub cant: f64,
    pub blade_count: usize,
    /// Hub relative to the CG, body axes (ft).
    pub position: Vector3<f64>,
    pub twist: f64,
    pub lift_slope: f64,
    pub profile_drag: f64,
}

impl TailRotorGeometry {
    pub fn validate(&self) -> Result<()> {
        let ok = self.radius > 0.0
            && self.chord > 0.0
            && self.omega > 0.0
            && self.blade_count >= 2
            && self.lift_slope > 0.0
            && self.profile_drag >= 0.0
            && self.cant.is_finite()
            && self.position.iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config("tail rotor: invalid geometry".into()))
        }
    }

    pub fn solidity(&self) -> f64 {
        self.blade_count as f64 * self.chord / (PI * self.radius)
    }

    pub fn tip_speed(&self) -> f64 {
        self.omega * self.radius
    }

    /// Unit thrust direction in body axes.
    pub fn thrust_axis(&self) -> Vector3<f64> {
        Vector3::new(0.0, self.cant.cos(), -self.cant.sin())
    }

    /// Inflow time constant (s) at flow speed `speed`.
    pub fn inflow_time_constant(&self, speed: f64) -> f64 {
        4.0 * self.radius / (2.0 * PI * speed.max(MIN_FLOW_SPEED))
    }
}

/// Main-rotor wake velocity at a receiving component, body axes. Positive
/// z is downwash.
pub fn wake_induced_velocity(
    lambda0: f64,
    tip_speed: f64,
    beta1c: f64,
    chi: f64,
    table: &InterferenceTable,
    receiver: WakeReceiver,
) -> Vector3<f64> {
    let (vx, vz) = table.lookup(chi, beta1c, receiver);
    Vector3::new(vx, 0.0, vz) * (lambda0 * tip_speed)
}

/// Velocity of the tail-rotor hub relative to the local air, body axes.
pub fn tr_local_velocity(
    velocity: &Vector3<f64>,
    rates: &Vector3<f64>,
    geom: &TailRotorGeometry,
    wake: &Vector3<f64>,
) -> Vector3<f64> {
    velocity + rates.cross(&geom.position) - wake
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRotorOutput {
    pub thrust: f64,
    pub torque: f64,
    pub ct: f64,
    pub cq: f64,
    pub mu: f64,
    /// Total inflow ratio through the disk, induced plus free stream.
    pub lambda_total: f64,
    /// Flow speed used by the inflow equation (ft/s).
    pub flow_speed: f64,
}

/// Thrust and torque from collective `theta0` (rad), hub velocity relative
/// to the air and induced inflow ratio.
pub fn tr_thrust_torque(
    theta0: f64,
    local_velocity: &Vector3<f64>,
    lambda: f64,
    geom: &TailRotorGeometry,
    rho: f64,
) -> TailRotorOutput {
    let tip = geom.tip_speed();
    let axis = geom.thrust_axis();
    let normal = local_velocity.dot(&axis);
    let in_plane = (local_velocity - axis * normal).norm();
    let mu = in_plane / tip;
    let mu2 = mu * mu;
    let lambda_total = lambda + normal / tip;
    let sigma = geom.solidity();
    let ct = 0.5 * geom.lift_slope * sigma
        * (theta0 * (1.0 / 3.0 + 0.5 * mu2) + geom.twist * 0.25 * (1.0 + mu2) - 0.5 * lambda_total);
    let cq = lambda_total * ct + sigma * geom.profile_drag * (1.0 + 3.0 * mu2) / 8.0;
    let k = rho * PI * geom.omega.powi(2) * geom.radius.powi(4);
    TailRotorOutput {
        thrust: k * ct,
        torque: k * geom.radius * cq,
        ct,
        cq,
        mu,
        lambda_total,
        flow_speed: (tip * mu.hypot(lambda_total)).max(MIN_FLOW_SPEED),
    }
}

/// Tail-rotor loads about the CG. The shaft torque reacts about the thrust
/// axis.
pub fn tr_body_loads(thrust: f64, torque: f64, geom: &TailRotorGeometry) -> Loads {
    let axis = geom.thrust_axis();
    let force = axis * thrust;
    Loads::new(
        force,
        geom.position.cross(&force) - axis * torque,
        LoadSource::TailRotor,
    )
}

/// Inflow residual. `flow_speed` is floored at [`MIN_FLOW_SPEED`].
pub fn tr_inflow_residual(
    lambda: f64,
    lambda_dot: f64,
    ct: f64,
    flow_speed: f64,
    geom: &TailRotorGeometry,
) -> f64 {
    let v = flow_speed.max(MIN_FLOW_SPEED);
    geom.inflow_time_constant(v) * lambda_dot + lambda - ct * geom.tip_speed() / (2.0 * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vehicle::config::VehicleConfig;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn geom() -> TailRotorGeometry {
        VehicleConfig::default().tail_rotor
    }

    #[test]
    fn local_velocity() {
        let g = geom();
        let z = Vector3::zeros();
        assert_eq!(tr_local_velocity(&z, &z, &g, &z), z);
        let r = 0.2;
        let v = tr_local_velocity(&z, &Vector3::new(0.0, 0.0, r), &g, &z);
        assert_abs_diff_eq!(v.y, r * g.position.x, epsilon = 1e-12);
        assert_abs_diff_eq!(v.y.abs(), r * 31.4, epsilon = 1e-12);
    }

    #[test]
    fn wake_magnitude() {
        let table = InterferenceTable::default_table();
        let w = wake_induced_velocity(0.06, 724.41, 0.0, 0.0, &table, WakeReceiver::TailRotor);
        let (_, vz) = table.lookup(0.0, 0.0, WakeReceiver::TailRotor);
        assert_abs_diff_eq!(w.z / vz, 0.06 * 724.41, epsilon = 1e-12);
        assert_abs_diff_eq!(0.06 * 724.41, 43.46, epsilon = 0.01);
    }

    #[test]
    fn thrust_coefficient() {
        let g = TailRotorGeometry { twist: 0.0, ..geom() };
        let z = Vector3::zeros();
        assert_eq!(tr_thrust_torque(0.0, &z, 0.0, &g, 0.002).ct, 0.0);
        let a = tr_thrust_torque(0.1, &z, 0.0, &g, 0.002).ct;
        let b = tr_thrust_torque(0.2, &z, 0.0, &g, 0.002).ct;
        assert_abs_diff_eq!(b, 2.0 * a, epsilon = 1e-15);
        let k = 0.0023769 * PI * 124.62f64.powi(2) * 5.5f64.powi(4);
        assert_abs_diff_eq!(k * 0.01, 1061.0, epsilon = 1.0);
    }

    #[test]
    fn body_loads() {
        let g = geom();
        let l = tr_body_loads(1000.0, 0.0, &g);
        assert_abs_diff_eq!(l.y(), 939.69, epsilon = 0.01);
        assert_abs_diff_eq!(-l.z(), 342.02, epsilon = 0.01);
        let l = tr_body_loads(0.0, 50.0, &g);
        assert_eq!(l.force, Vector3::zeros());
        assert_abs_diff_eq!(l.moment.norm(), 50.0, epsilon = 1e-12);
    }

    #[test]
    fn inflow() {
        let g = geom();
        assert_eq!(tr_inflow_residual(0.0, 0.0, 0.0, 100.0, &g), 0.0);
        let steady = 0.01 * 124.62 * 5.5 / 200.0;
        assert_abs_diff_eq!(steady, 0.034271, epsilon = 1e-6);
        assert_abs_diff_eq!(tr_inflow_residual(steady, 0.0, 0.01, 100.0, &g), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.inflow_time_constant(100.0), 0.035, epsilon = 1e-3);
    }

    proptest! {
        #[test]
        fn decomposition_preserves_thrust(t in -5000.0..5000.0f64) {
            let l = tr_body_loads(t, 0.0, &geom());
            prop_assert!((l.force.norm() - t.abs()).abs() < 1e-9 * (1.0 + t.abs()));
        }

        #[test]
        fn steady_inflow_is_linear_in_thrust(ct in 0.0..0.02f64, v in 5.0..300.0f64) {
            let g = geom();
            let l1 = ct * g.tip_speed() / (2.0 * v);
            prop_assert!(tr_inflow_residual(l1, 0.0, ct, v, &g).abs() < 1e-15);
            prop_assert!(tr_inflow_residual(2.0 * l1, 0.0, 2.0 * ct, v, &g).abs() < 1e-15);
        }
    }
}
