//! Three-state dynamic inflow (Pitt-Peters).
//!
//! States are ordered (uniform, cosine, sine). Forcing is
//! (C_T, C_1c, C_1s) where C_1c = -M_pitch / (rho A (Omega R)^2 R) and
//! C_1s = -M_roll / (...), with hub moments positive nose-up and right side
//! down. With that sign choice thrust concentrated aft or on the advancing
//! side drives positive cosine or sine inflow.
//!
//! Matrices used:
//!
//! ```text
//! M     = diag(8/(3 pi), 16/(45 pi), 16/(45 pi))
//! L     = [ 1/2   -X           0          ]
//!         [ X     4c/(1+c)     0          ]     X = 15 pi/64 tan(chi/2)
//!         [ 0     0            4/(1+c)    ]     c = cos chi
//! V     = diag(V_T, V_m, V_m)
//! M d(lambda)/d(Omega t) + V L^-1 lambda = forcing
//! ```

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use super::geometry::InflowState;
use crate::error::{Error, Result};

const MASS_FLOW_FLOOR: f64 = 1e-12;

pub fn apparent_mass() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(
        8.0 / (3.0 * PI),
        16.0 / (45.0 * PI),
        16.0 / (45.0 * PI),
    ))
}

/// Wake skew from the hub: 0 in hover, towards pi/2 at high speed.
pub fn wake_skew(lambda0: f64, mu: f64, mu_z: f64) -> Result<f64> {
    let normal = lambda0 + mu_z;
    if mu == 0.0 && normal == 0.0 {
        return Err(Error::UndefinedSkew);
    }
    Ok(mu.atan2(normal))
}

/// Total and mass-flow velocity parameters (V_T, V_m).
pub fn mass_flow(lambda0: f64, mu: f64, mu_z: f64) -> Result<(f64, f64)> {
    let lt = lambda0 + mu_z;
    let vt = mu.hypot(lt);
    if !(vt > MASS_FLOW_FLOOR) {
        return Err(Error::SingularInflow);
    }
    Ok((vt, (mu * mu + lt * (lt + lambda0)) / vt))
}

/// Static gain matrix for a wake skew angle.
pub fn static_gain(chi: f64) -> Matrix3<f64> {
    let c = chi.cos();
    let x = 15.0 * PI / 64.0 * (0.5 * chi).tan();
    Matrix3::new(
        0.5,
        -x,
        0.0,
        x,
        4.0 * c / (1.0 + c),
        0.0,
        0.0,
        0.0,
        4.0 / (1.0 + c),
    )
}

fn gain_inverse(chi: f64) -> Result<Matrix3<f64>> {
    static_gain(chi)
        .try_inverse()
        .ok_or_else(|| Error::Numeric(format!("inflow gain singular at skew {chi}")))
}

/// Residual of the dynamic inflow equations. `lambda_dot` is in 1/s.
pub fn inflow_residual(
    lambda: &InflowState,
    lambda_dot: &InflowState,
    forcing: [f64; 3],
    mu: f64,
    mu_z: f64,
    omega: f64,
) -> Result<[f64; 3]> {
    let (vt, vm) = mass_flow(lambda.lambda0, mu, mu_z)?;
    let chi = wake_skew(lambda.lambda0, mu, mu_z)?;
    let linv = gain_inverse(chi)?;
    let l = Vector3::from(lambda.to_array());
    let ld = Vector3::from(lambda_dot.to_array());
    let v = Matrix3::from_diagonal(&Vector3::new(vt, vm, vm));
    let r = apparent_mass() * ld / omega + v * linv * l - Vector3::from(forcing);
    Ok([r.x, r.y, r.z])
}

/// Time constants on the inflow rows: d(lambda)/dt coefficients are M/Omega.
pub fn inflow_rate_coefficients(omega: f64) -> [f64; 3] {
    let m = apparent_mass();
    [m[(0, 0)] / omega, m[(1, 1)] / omega, m[(2, 2)] / omega]
}

/// Steady inflow for fixed forcing.
pub fn steady_inflow(forcing: [f64; 3], mu: f64, mu_z: f64) -> Result<InflowState> {
    if forcing == [0.0; 3] && mu == 0.0 && mu_z == 0.0 {
        return Ok(InflowState::default());
    }
    let solve_rest = |l0: f64| -> Result<(f64, InflowState)> {
        let (vt, vm) = mass_flow(l0, mu, mu_z)?;
        let chi = wake_skew(l0, mu, mu_z)?;
        let l = static_gain(chi) * Vector3::new(forcing[0] / vt, forcing[1] / vm, forcing[2] / vm);
        Ok((l.x - l0, InflowState::from_array([l0, l.y, l.z])))
    };
    // hover momentum value as the starting point, kept off the singularity
    let mut l0 = (forcing[0].abs() / 2.0).sqrt().max(1e-4);
    for _ in 0..200 {
        let (f, state) = solve_rest(l0)?;
        if f.abs() < 1e-15 {
            return Ok(state);
        }
        let h = 1e-7 * l0.abs().max(1e-3);
        let (fp, _) = solve_rest(l0 + h)?;
        let slope = (fp - f) / h;
        let step = if slope.abs() > 1e-12 { -f / slope } else { f };
        // keep the iterate on the physical branch
        let mut next = l0 + step;
        if next + mu_z <= 0.0 && mu == 0.0 {
            next = 0.5 * l0;
        }
        if (next - l0).abs() < 1e-15 * l0.abs().max(1.0) {
            return solve_rest(next).map(|(_, s)| s);
        }
        l0 = next;
    }
    Err(Error::Numeric("steady inflow iteration did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn hover_momentum() {
        let s = steady_inflow([0.008, 0.0, 0.0], 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(s.lambda0, 0.063246, epsilon = 1e-6);
        assert_abs_diff_eq!(s.lambda0, (0.004f64).sqrt(), epsilon = 1e-14);
        assert_eq!(s.lambda1c, 0.0);
        assert_eq!(s.lambda1s, 0.0);
        let r = inflow_residual(&s, &InflowState::default(), [0.008, 0.0, 0.0], 0.0, 0.0, 27.0)
            .unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn zero_thrust() {
        assert_eq!(steady_inflow([0.0; 3], 0.0, 0.0).unwrap(), InflowState::default());
        let s = steady_inflow([0.0; 3], 0.2, 0.0).unwrap();
        assert!(s.lambda0.abs() < 1e-14);
    }

    #[test]
    fn forward_flight_gradient() {
        let s = steady_inflow([0.007, 0.0, 0.0], 0.2, 0.0).unwrap();
        assert!(s.lambda1c > 0.0, "more inflow aft expected, got {s:?}");
    }

    #[test]
    fn skew() {
        assert_eq!(wake_skew(0.05, 0.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(wake_skew(0.1, 0.1, 0.0).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(wake_skew(0.02, 0.2, 0.0).unwrap(), 10f64.atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(wake_skew(0.02, 0.2, 0.0).unwrap(), 1.4711, epsilon = 1e-4);
        assert!(matches!(wake_skew(0.0, 0.0, 0.0), Err(Error::UndefinedSkew)));
    }

    #[test]
    fn singular_mass_flow() {
        let z = InflowState::default();
        assert!(matches!(
            inflow_residual(&z, &z, [0.0; 3], 0.0, 0.0, 27.0),
            Err(Error::SingularInflow)
        ));
    }

    #[test]
    fn gain_is_invertible_across_skew() {
        for k in 0..=90 {
            let chi = (k as f64).to_radians();
            assert!(static_gain(chi).determinant() > 0.0);
        }
    }
}
