//! First-harmonic flap and lag equations.
//!
//! For each hinge the blade moment balance is written as
//! `I * x_dd(psi) = G(psi)`, where `G` collects the aerodynamic, inertial
//! and restraint moments evaluated with the harmonic accelerations removed.
//! Projecting onto (1, cos psi, sin psi) and dividing by `I` gives one
//! residual per harmonic: `d(rate_k)/dt - G_k / I`.

use super::geometry::RotorGeometry;

fn residual(rate_dot: &[f64; 3], moments: &[f64; 3], inertia: f64) -> [f64; 3] {
    [
        rate_dot[0] - moments[0] / inertia,
        rate_dot[1] - moments[1] / inertia,
        rate_dot[2] - moments[2] / inertia,
    ]
}

/// Flap residual per harmonic (1/s^2).
pub fn flap_residual(flap_rate_dot: &[f64; 3], moments: &[f64; 3], geom: &RotorGeometry) -> [f64; 3] {
    residual(flap_rate_dot, moments, geom.blade_inertia())
}

/// Lag residual per harmonic (1/s^2).
pub fn lag_residual(lag_rate_dot: &[f64; 3], moments: &[f64; 3], geom: &RotorGeometry) -> [f64; 3] {
    residual(lag_rate_dot, moments, geom.blade_inertia())
}

/// Centrifugal flap stiffness: integral of m Omega^2 y (y - e) over the blade.
pub fn centrifugal_flap_stiffness(geom: &RotorGeometry) -> f64 {
    geom.omega.powi(2) * (geom.hinge_offset * geom.blade_first_moment() + geom.blade_inertia())
}

/// Rotating natural frequencies (rad/s) of the uncoupled flap and lag
/// modes in vacuum, including hinge springs.
pub fn natural_frequencies(geom: &RotorGeometry) -> (f64, f64) {
    let i = geom.blade_inertia();
    let flap = (centrifugal_flap_stiffness(geom) + geom.flap_spring) / i;
    let lag = (geom.omega.powi(2) * geom.hinge_offset * geom.blade_first_moment() + geom.lag_spring) / i;
    (flap.sqrt(), lag.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotor::geometry::RotorState;
    use crate::rotor::loads::hinge_inertial_moments;
    use crate::vehicle::config::VehicleConfig;
    use approx::assert_abs_diff_eq;

    fn geom() -> RotorGeometry {
        VehicleConfig::default().main_rotor
    }

    /// Harmonic projection of the vacuum hinge moments at 360 azimuths.
    fn projected(g: &RotorGeometry, s: &RotorState) -> ([f64; 3], [f64; 3]) {
        let n = 360;
        let mut f = [0.0; 3];
        let mut l = [0.0; 3];
        for k in 0..n {
            let psi = std::f64::consts::TAU * k as f64 / n as f64;
            let (mf, ml) = hinge_inertial_moments(g, psi, s);
            for (acc, v) in [(&mut f, mf), (&mut l, ml)] {
                acc[0] += v / n as f64;
                acc[1] += 2.0 * v * psi.cos() / n as f64;
                acc[2] += 2.0 * v * psi.sin() / n as f64;
            }
        }
        (f, l)
    }

    #[test]
    fn zero_state_zero_residual() {
        let g = geom();
        assert_eq!(flap_residual(&[0.0; 3], &[0.0; 3], &g), [0.0; 3]);
        assert_eq!(lag_residual(&[0.0; 3], &[0.0; 3], &g), [0.0; 3]);
        let (f, l) = projected(&g, &RotorState::default());
        assert!(f.iter().chain(&l).all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn steady_coning_balances_aero_moment() {
        let g = geom();
        let aero = 2000.0;
        let beta0 = aero / centrifugal_flap_stiffness(&g);
        let s = RotorState { flap: [beta0, 0.0, 0.0], ..Default::default() };
        let (f, _) = projected(&g, &s);
        let r = flap_residual(&[0.0; 3], &[f[0] + aero, f[1], f[2]], &g);
        // exact balance up to the sin/cos nonlinearity of the hinge
        assert!(r[0].abs() < 1e-2 * aero / g.blade_inertia() * beta0, "{r:?}");
    }

    #[test]
    fn offset_hinge_frequencies() {
        let g = geom();
        let e = g.hinge_offset / g.radius;
        let om2 = g.omega * g.omega;
        let (nf, nl) = natural_frequencies(&g);
        assert_abs_diff_eq!(nf * nf / om2, 1.0 + 1.5 * e / (1.0 - e), epsilon = 1e-12);
        assert_abs_diff_eq!(nl * nl / om2, 1.5 * e / (1.0 - e), epsilon = 1e-12);
        let small = RotorGeometry { hinge_offset: 0.04 * g.radius, ..g.clone() };
        assert_abs_diff_eq!(natural_frequencies(&small).1 / g.omega, 0.25, epsilon = 1e-12);

        // recovered from the homogeneous residual of the full hinge model
        let eps = 1e-6;
        let s = RotorState { flap: [eps, 0.0, 0.0], ..Default::default() };
        let (f, _) = projected(&g, &s);
        let from_residual = -f[0] / (g.blade_inertia() * eps);
        assert_abs_diff_eq!(from_residual / (nf * nf), 1.0, epsilon = 1e-6);
        let s = RotorState { lag: [eps, 0.0, 0.0], ..Default::default() };
        let (_, l) = projected(&g, &s);
        let from_residual = -l[0] / (g.blade_inertia() * eps);
        assert_abs_diff_eq!(from_residual / (nl * nl), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn lag_frequency_in_expected_band() {
        let g = geom();
        let ratio = natural_frequencies(&g).1 / g.omega;
        assert!((0.2..=0.3).contains(&ratio), "{ratio}");
    }
}
