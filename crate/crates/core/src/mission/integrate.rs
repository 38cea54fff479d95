//! Time propagation of the explicit-form dynamics and of earth position.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::frames::{euler_to_dcm, EulerAngles, FT_TO_M};
use crate::vehicle::state::{PHI, PSI, THETA, U};
use crate::vehicle::{ControlVector, Evaluation, SystemState, Vehicle};

/// Largest accepted physics step (s).
pub const MAX_DT: f64 = 0.05;

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt <= MAX_DT {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time step {dt} s outside (0, {MAX_DT}]")))
    }
}

fn attitude(y: &SystemState) -> EulerAngles {
    EulerAngles::new(y[PHI], y[THETA], y[PSI])
}

/// Earth-frame velocity (m/s, NED) of a body velocity given in ft/s.
pub fn earth_velocity(attitude: EulerAngles, body_velocity: &Vector3<f64>) -> Result<Vector3<f64>> {
    let to_body = euler_to_dcm(attitude)?;
    Ok(to_body.inverse().apply(body_velocity) * FT_TO_M)
}

/// Advances earth position (m) by one explicit step with body velocity in
/// ft/s. Z is positive down.
pub fn update_position(
    position: &Vector3<f64>,
    attitude: EulerAngles,
    body_velocity: &Vector3<f64>,
    dt: f64,
) -> Result<Vector3<f64>> {
    Ok(position + earth_velocity(attitude, body_velocity)? * dt)
}

fn state_velocity(y: &SystemState) -> Result<Vector3<f64>> {
    earth_velocity(attitude(y), &y.fixed_rows::<3>(U).into_owned())
}

fn check_finite(y: &SystemState) -> Result<()> {
    match y.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(i) => Err(Error::Numeric(format!(
            "state {} became non-finite",
            crate::vehicle::STATE_NAMES[i]
        ))),
    }
}

/// One RK4 step of state and position. Also returns the evaluation at the
/// start of the step.
pub(crate) fn rk4(
    vehicle: &Vehicle,
    y: &SystemState,
    position: &Vector3<f64>,
    u: &ControlVector,
    dt: f64,
) -> Result<(SystemState, Vector3<f64>, Evaluation)> {
    let (k1, ev) = vehicle.state_derivative(y, u)?;
    let p1 = state_velocity(y)?;
    let y2 = y + k1 * (0.5 * dt);
    let (k2, _) = vehicle.state_derivative(&y2, u)?;
    let p2 = state_velocity(&y2)?;
    let y3 = y + k2 * (0.5 * dt);
    let (k3, _) = vehicle.state_derivative(&y3, u)?;
    let p3 = state_velocity(&y3)?;
    let y4 = y + k3 * dt;
    let (k4, _) = vehicle.state_derivative(&y4, u)?;
    let p4 = state_velocity(&y4)?;
    let next = y + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
    check_finite(&next)?;
    let pos = position + (p1 + (p2 + p3) * 2.0 + p4) * (dt / 6.0);
    Ok((next, pos, ev))
}

/// Classical fourth-order Runge-Kutta step with controls held.
pub fn integrate_step(vehicle: &Vehicle, y: &SystemState, u: &ControlVector, dt: f64) -> Result<SystemState> {
    check_dt(dt)?;
    Ok(rk4(vehicle, y, &Vector3::zeros(), u, dt)?.0)
}

pub(crate) fn checked_rk4(
    vehicle: &Vehicle,
    y: &SystemState,
    position: &Vector3<f64>,
    u: &ControlVector,
    dt: f64,
) -> Result<(SystemState, Vector3<f64>, Evaluation)> {
    check_dt(dt)?;
    rk4(vehicle, y, position, u, dt)
}

/// Earth z velocity (m/s), positive descending.
pub(crate) fn sink_rate(y: &SystemState) -> Result<f64> {
    Ok(state_velocity(y)?[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::KTS_TO_FTPS;

    #[test]
    fn hundred_knots_for_one_second() {
        let p = update_position(
            &Vector3::zeros(),
            EulerAngles::default(),
            &Vector3::new(100.0 * KTS_TO_FTPS, 0.0, 0.0),
            1.0,
        )
        .unwrap();
        assert!((p[0] - 51.444).abs() < 1e-3, "{p}");
        assert!(p[1].abs() < 1e-12 && p[2].abs() < 1e-12);
    }

    #[test]
    fn zero_velocity_stays_put() {
        let start = Vector3::new(3.0, -4.0, -20.0);
        let p = update_position(&start, EulerAngles::new(0.1, 0.2, 0.3), &Vector3::zeros(), 0.5).unwrap();
        assert_eq!(p, start);
    }

    #[test]
    fn heading_preserves_ground_speed() {
        let v = Vector3::new(120.0, 8.0, 0.0);
        let a = earth_velocity(EulerAngles::new(0.0, 0.0, 0.0), &v).unwrap();
        let b = earth_velocity(EulerAngles::new(0.0, 0.0, 2.1), &v).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_steps() {
        let v = Vehicle::at_altitude(Default::default(), 0.0).unwrap();
        let y = SystemState::zeros();
        let u = ControlVector::neutral();
        assert!(integrate_step(&v, &y, &u, 0.0).is_err());
        assert!(integrate_step(&v, &y, &u, 0.06).is_err());
    }
}
