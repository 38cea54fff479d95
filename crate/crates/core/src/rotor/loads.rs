//! Blade-element load integration around the azimuth.
//!
//! Each blade is a rigid beam hinged at offset `e`, flapping up by beta and
//! lagging back by zeta. In hub axes (x forward, y right, z down along the
//! shaft) the blade at azimuth psi has
//!
//! ```text
//! e_r = (-cos psi, sin psi, 0)   radial
//! e_t = ( sin psi, cos psi, 0)   direction of rotation
//! e_u = (0, 0, -1)               up the shaft
//! ```
//!
//! Inertial loads use blade accelerations relative to the hub plus the
//! Coriolis term from body rates. Hub translational and body angular
//! accelerations are carried by the rigid-body equations and are left out
//! here, so the hub loads do not depend on state derivatives.

use nalgebra::{Matrix3, Vector3};

use super::geometry::{InflowState, RotorGeometry, RotorState, SwashplateAngles};
use crate::error::{Error, Result};
use crate::frames::Atmosphere;
use crate::loads::{LoadSource, Loads};
use crate::tables::AirfoilTable;

/// Lift, drag and the force they make in the blade section plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementLoads {
    pub lift: f64,
    pub drag: f64,
    /// Component along the section normal (positive up).
    pub normal: f64,
    /// Component along the direction of rotation.
    pub tangential: f64,
    pub inflow_angle: f64,
    pub alpha: f64,
}

/// Airloads on one element from its tangential (`ut`, positive against the
/// leading edge) and perpendicular (`up`, positive down through the disk)
/// velocities.
pub fn element_airloads(
    ut: f64,
    up: f64,
    pitch: f64,
    table: &AirfoilTable,
    rho: f64,
    chord: f64,
    dr: f64,
    speed_of_sound: f64,
) -> Result<ElementLoads> {
    if !(dr > 0.0) {
        return Err(Error::InvalidArgument(format!("element width {dr}")));
    }
    let v2 = ut * ut + up * up;
    let phi = up.atan2(ut);
    let alpha = pitch - phi;
    if v2 == 0.0 {
        return Ok(ElementLoads {
            lift: 0.0,
            drag: 0.0,
            normal: 0.0,
            tangential: 0.0,
            inflow_angle: phi,
            alpha,
        });
    }
    let v = v2.sqrt();
    let c = table.lookup(alpha, v / speed_of_sound);
    let q = 0.5 * rho * v2 * chord * dr;
    let lift = q * c.cl;
    let drag = q * c.cd;
    let (s, co) = phi.sin_cos();
    Ok(ElementLoads {
        lift,
        drag,
        normal: lift * co - drag * s,
        tangential: -(lift * s + drag * co),
        inflow_angle: phi,
        alpha,
    })
}

/// Everything the rotor needs from the rest of the aircraft.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotorInput {
    /// CG velocity, body axes (ft/s).
    pub velocity: Vector3<f64>,
    /// Body angular rates (rad/s).
    pub rates: Vector3<f64>,
    pub controls: SwashplateAngles,
    pub inflow: InflowState,
    pub blades: RotorState,
}

/// Integrated rotor output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorLoads {
    /// Loads on the airframe about the CG, body axes.
    pub loads: Loads,
    /// Hub force and moment (about the hub centre), hub axes.
    pub hub_force: Vector3<f64>,
    pub hub_moment: Vector3<f64>,
    pub aero_force: Vector3<f64>,
    pub inertial_force: Vector3<f64>,
    /// Aerodynamic moment about the hub centre, hub axes.
    pub aero_moment: Vector3<f64>,
    pub thrust: f64,
    pub ct: f64,
    /// Inflow forcing (C_T, C_1c, C_1s).
    pub inflow_forcing: [f64; 3],
    /// Shaft torque (ft*lbf) and power (ft*lbf/s).
    pub torque: f64,
    pub power: f64,
    pub profile_power: f64,
    /// First-harmonic projections of the flap and lag hinge moments
    /// excluding blade acceleration terms that come from state derivatives
    /// (lbf*ft).
    pub flap_moments: [f64; 3],
    pub lag_moments: [f64; 3],
    /// Aerodynamic parts of the hinge moment projections.
    pub aero_flap_moments: [f64; 3],
    pub aero_lag_moments: [f64; 3],
    pub mu: f64,
    pub mu_z: f64,
}

/// Precomputed discretisation for a rotor.
#[derive(Debug, Clone)]
pub struct RotorModel {
    pub geom: RotorGeometry,
    hub: Matrix3<f64>,
    span: Vec<f64>,
    twist: Vec<f64>,
    dr: f64,
    // cos psi, sin psi, cos(psi + phase), sin(psi + phase)
    azimuth: Vec<[f64; 4]>,
}

struct BladeFrame {
    d: Vector3<f64>,
    d_dot: Vector3<f64>,
    d_dd: Vector3<f64>,
    t: Vector3<f64>,
    n: Vector3<f64>,
}

#[derive(Debug, Clone, Copy)]
struct BladeAngles {
    beta: f64,
    beta_dot: f64,
    beta_dd: f64,
    zeta: f64,
    zeta_dot: f64,
    zeta_dd: f64,
}

/// Flap or lag angle, rate and the part of its acceleration that does not
/// involve the harmonic accelerations.
fn harmonic_motion(x: &[f64; 3], xd: &[f64; 3], omega: f64, c: f64, s: f64) -> (f64, f64, f64) {
    let pos = x[0] + x[1] * c + x[2] * s;
    let vel = xd[0] + (xd[1] + omega * x[2]) * c + (xd[2] - omega * x[1]) * s;
    let acc = (2.0 * omega * xd[2] - omega * omega * x[1]) * c
        + (-2.0 * omega * xd[1] - omega * omega * x[2]) * s;
    (pos, vel, acc)
}

fn blade_frame(a: &BladeAngles, omega: f64, er: &Vector3<f64>, et: &Vector3<f64>) -> BladeFrame {
    let eu = Vector3::new(0.0, 0.0, -1.0);
    let (sb, cb) = a.beta.sin_cos();
    let (sz, cz) = a.zeta.sin_cos();
    let (bd, zd) = (a.beta_dot, a.zeta_dot);
    let (bdd, zdd) = (a.beta_dd, a.zeta_dd);
    let rates2 = bd * bd + zd * zd;

    let ca = cb * cz;
    let cbb = -cb * sz;
    let cc = sb;
    let ca_d = -sb * cz * bd - cb * sz * zd;
    let cbb_d = sb * sz * bd - cb * cz * zd;
    let cc_d = cb * bd;
    let ca_dd = -cb * cz * rates2 + 2.0 * sb * sz * bd * zd - sb * cz * bdd - cb * sz * zdd;
    let cbb_dd = cb * sz * rates2 + 2.0 * sb * cz * bd * zd + sb * sz * bdd - cb * cz * zdd;
    let cc_dd = -sb * bd * bd + cb * bdd;

    let w2 = omega * omega;
    let d = er * ca + et * cbb + eu * cc;
    let d_dot = er * (ca_d - cbb * omega) + et * (cbb_d + ca * omega) + eu * cc_d;
    let d_dd = er * (ca_dd - 2.0 * cbb_d * omega - ca * w2)
        + et * (cbb_dd + 2.0 * ca_d * omega - cbb * w2)
        + eu * cc_dd;
    let t = er * sz + et * cz;
    let lagged_radial = er * cz - et * sz;
    let n = -lagged_radial * sb + eu * cb;
    BladeFrame {
        d,
        d_dot,
        d_dd,
        t,
        n,
    }
}

/// Flap and lag hinge moments of the blade inertial loads for given blade
/// motion, with body rates `w` in hub axes. Returns (flap, lag, force).
fn inertial_hinge(
    geom: &RotorGeometry,
    f: &BladeFrame,
    er: &Vector3<f64>,
    et: &Vector3<f64>,
    w: &Vector3<f64>,
) -> (f64, f64, Vector3<f64>) {
    let e = geom.hinge_offset;
    let om = geom.omega;
    let hinge_dot = et * (e * om);
    let hinge_dd = er * (-e * om * om);
    let a_h = hinge_dd + 2.0 * w.cross(&hinge_dot);
    let a_d = f.d_dd + 2.0 * w.cross(&f.d_dot);
    let force = -(a_h * geom.blade_mass() + a_d * geom.blade_first_moment());
    let moment = -(f.d.cross(&a_h) * geom.blade_first_moment() + f.d.cross(&a_d) * geom.blade_inertia());
    let flap = -moment.dot(&f.t);
    let lag = moment.z;
    (flap, lag, force)
}

impl RotorModel {
    pub fn new(geom: RotorGeometry) -> Result<Self> {
        geom.validate()?;
        let (stations, dr) = geom.stations();
        let span = stations.iter().map(|r| r - geom.hinge_offset).collect();
        let twist = stations.iter().map(|&r| geom.twist_at(r)).collect();
        let n = geom.azimuth_steps;
        let azimuth = (0..n)
            .map(|k| {
                let psi = std::f64::consts::TAU * k as f64 / n as f64;
                let (s, c) = psi.sin_cos();
                let (sp, cp) = (psi + geom.control_phase).sin_cos();
                [c, s, cp, sp]
            })
            .collect();
        Ok(Self {
            hub: geom.hub_matrix(),
            geom,
            span,
            twist,
            dr,
            azimuth,
        })
    }

    /// Body-to-hub rotation.
    pub fn hub_matrix(&self) -> &Matrix3<f64> {
        &self.hub
    }

    pub fn samples_per_blade(&self) -> usize {
        self.span.len() * self.azimuth.len()
    }

    /// Hub velocity in hub axes, advance ratio and climb inflow ratio.
    pub fn hub_kinematics(&self, velocity: &Vector3<f64>, rates: &Vector3<f64>) -> (Vector3<f64>, f64, f64) {
        let v = self.hub * (velocity + rates.cross(&self.geom.hub_position));
        let tip = self.geom.tip_speed();
        (v, v.x.hypot(v.y) / tip, -v.z / tip)
    }

    /// Integrates aerodynamic and inertial blade loads over one revolution.
    pub fn integrate(
        &self,
        input: &RotorInput,
        airfoil: &AirfoilTable,
        atm: &Atmosphere,
    ) -> Result<RotorLoads> {
        let g = &self.geom;
        let om = g.omega;
        let tip = g.tip_speed();
        let e = g.hinge_offset;
        let (v_hub, mu, mu_z) = self.hub_kinematics(&input.velocity, &input.rates);
        let w_hub = self.hub * input.rates;
        let zhat = Vector3::new(0.0, 0.0, 1.0);
        let k_el = 0.5 * atm.density * g.chord * self.dr;
        let inv_a = 1.0 / atm.speed_of_sound;
        let b = &input.blades;
        let c = &input.controls;
        let l = &input.inflow;

        let mut hub_force = Vector3::zeros();
        let mut hub_moment = Vector3::zeros();
        let mut aero_force = Vector3::zeros();
        let mut inertial_force = Vector3::zeros();
        let mut aero_moment = Vector3::zeros();
        let mut profile = 0.0;
        let mut flap = [0.0; 3];
        let mut lag = [0.0; 3];
        let mut aero_flap = [0.0; 3];
        let mut aero_lag = [0.0; 3];

        for (k, &[cp, sp, cpc, spc]) in self.azimuth.iter().enumerate() {
            let (beta, beta_dot, beta_dd) = harmonic_motion(&b.flap, &b.flap_rate, om, cp, sp);
            let (zeta, zeta_dot, zeta_dd) = harmonic_motion(&b.lag, &b.lag_rate, om, cp, sp);
            let er = Vector3::new(-cp, sp, 0.0);
            let et = Vector3::new(sp, cp, 0.0);
            let angles = BladeAngles {
                beta,
                beta_dot,
                beta_dd,
                zeta,
                zeta_dot,
                zeta_dd,
            };
            let f = blade_frame(&angles, om, &er, &et);
            let hinge = er * e;
            let hinge_dot = et * (e * om);

            // relative air velocity at span s from the hinge: w0 + s w1
            let lam_h = l.lambda1c * cp + l.lambda1s * sp;
            let w0 = zhat * ((l.lambda0 + e / g.radius * lam_h) * tip)
                - v_hub
                - w_hub.cross(&hinge)
                - hinge_dot;
            let w1 = zhat * (lam_h * om) - w_hub.cross(&f.d) - f.d_dot;
            let ut0 = -w0.dot(&f.t);
            let ut1 = -w1.dot(&f.t);
            let up0 = -w0.dot(&f.n);
            let up1 = -w1.dot(&f.n);
            let pitch0 = c.theta0 + c.theta1c * cpc + c.theta1s * spc;

            let mut fn_sum = 0.0;
            let mut fn_mom = 0.0;
            let mut ft_sum = 0.0;
            let mut ft_mom = 0.0;
            let mut prof = 0.0;
            for (&s, &tw) in self.span.iter().zip(&self.twist) {
                let ut = ut0 + ut1 * s;
                let up = up0 + up1 * s;
                let v2 = ut * ut + up * up;
                let v = v2.sqrt();
                let alpha = pitch0 + tw - up.atan2(ut);
                let (cl, cd) = airfoil.lift_drag(alpha, v * inv_a);
                let qv = k_el * v;
                let fnrm = qv * (cl * ut - cd * up);
                let ftan = -qv * (cl * up + cd * ut);
                fn_sum += fnrm;
                fn_mom += fnrm * s;
                ft_sum += ftan;
                ft_mom += ftan * s;
                prof += qv * cd * v * ut;
            }
            if !(fn_sum.is_finite() && ft_sum.is_finite()) {
                return Err(self.locate_bad_element(k, ut0, ut1, up0, up1, pitch0, airfoil, atm));
            }

            let fa = f.n * fn_sum + f.t * ft_sum;
            let ma_hinge = -f.t * fn_mom + f.n * ft_mom;
            let cb = beta.cos();
            let m_flap_aero = fn_mom;
            let m_lag_aero = -ft_mom * cb;

            let (m_flap_in, m_lag_in, fi) = inertial_hinge(g, &f, &er, &et, &w_hub);

            let flap_restraint = g.flap_spring * beta + g.flap_damper * beta_dot;
            let lag_restraint = g.lag_spring * zeta + g.lag_damper * zeta_dot;
            let gf = m_flap_aero + m_flap_in - flap_restraint;
            let gl = m_lag_aero + m_lag_in - lag_restraint;
            for (acc, val) in [(&mut flap, gf), (&mut lag, gl), (&mut aero_flap, m_flap_aero), (&mut aero_lag, m_lag_aero)] {
                acc[0] += val;
                acc[1] += val * cp;
                acc[2] += val * sp;
            }

            let ftot = fa + fi;
            hub_force += ftot;
            // hinges pass moments about their axes only through the restraints
            hub_moment += hinge.cross(&ftot) - f.t * flap_restraint + Vector3::new(0.0, 0.0, lag_restraint);
            aero_force += fa;
            inertial_force += fi;
            aero_moment += hinge.cross(&fa) + ma_hinge;
            profile += prof;
        }

        let n = self.azimuth.len() as f64;
        let per_blade = g.blade_count as f64 / n;
        for acc in [&mut flap, &mut lag, &mut aero_flap, &mut aero_lag] {
            acc[0] /= n;
            acc[1] *= 2.0 / n;
            acc[2] *= 2.0 / n;
        }
        let hub_force = hub_force * per_blade;
        let hub_moment = hub_moment * per_blade;
        let aero_force = aero_force * per_blade;
        let inertial_force = inertial_force * per_blade;
        let aero_moment = aero_moment * per_blade;

        let norm = atm.density * g.disk_area() * tip * tip;
        let thrust = -aero_force.z;
        let (ct, c1c, c1s) = if norm > 0.0 {
            (
                thrust / norm,
                -aero_moment.y / (norm * g.radius),
                -aero_moment.x / (norm * g.radius),
            )
        } else {
            (0.0, 0.0, 0.0)
        };
        let torque = hub_moment.z;

        let ht = self.hub.transpose();
        let force_b = ht * hub_force;
        let moment_b = ht * hub_moment + g.hub_position.cross(&force_b);
        let out = RotorLoads {
            loads: Loads::new(force_b, moment_b, LoadSource::MainRotor),
            hub_force,
            hub_moment,
            aero_force,
            inertial_force,
            aero_moment,
            thrust,
            ct,
            inflow_forcing: [ct, c1c, c1s],
            torque,
            power: torque * om,
            profile_power: profile * per_blade,
            flap_moments: flap,
            lag_moments: lag,
            aero_flap_moments: aero_flap,
            aero_lag_moments: aero_lag,
            mu,
            mu_z,
        };
        if !out.loads.is_finite() {
            return Err(Error::Numeric("main rotor: non-finite hub loads".into()));
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    #[cold]
    fn locate_bad_element(
        &self,
        k: usize,
        ut0: f64,
        ut1: f64,
        up0: f64,
        up1: f64,
        pitch0: f64,
        airfoil: &AirfoilTable,
        atm: &Atmosphere,
    ) -> Error {
        for (i, (&s, &tw)) in self.span.iter().zip(&self.twist).enumerate() {
            let el = element_airloads(
                ut0 + ut1 * s,
                up0 + up1 * s,
                pitch0 + tw,
                airfoil,
                atm.density,
                self.geom.chord,
                self.dr,
                atm.speed_of_sound,
            );
            match el {
                Ok(el) if el.normal.is_finite() && el.tangential.is_finite() => {}
                _ => {
                    return Error::Numeric(format!(
                        "main rotor: non-finite airload at element {i}, azimuth step {k}"
                    ))
                }
            }
        }
        Error::Numeric(format!("main rotor: non-finite airload at azimuth step {k}"))
    }
}

/// Free-function form of [`RotorModel::integrate`].
pub fn integrate_rotor_loads(
    model: &RotorModel,
    input: &RotorInput,
    airfoil: &AirfoilTable,
    atm: &Atmosphere,
) -> Result<RotorLoads> {
    model.integrate(input, airfoil, atm)
}

/// Inertial flap and lag hinge moments for a single blade position, in
/// vacuum and without body motion. Used to check hinge dynamics.
pub fn hinge_inertial_moments(geom: &RotorGeometry, psi: f64, state: &RotorState) -> (f64, f64) {
    let (s, c) = psi.sin_cos();
    let (beta, beta_dot, beta_dd) = harmonic_motion(&state.flap, &state.flap_rate, geom.omega, c, s);
    let (zeta, zeta_dot, zeta_dd) = harmonic_motion(&state.lag, &state.lag_rate, geom.omega, c, s);
    let er = Vector3::new(-c, s, 0.0);
    let et = Vector3::new(s, c, 0.0);
    let f = blade_frame(
        &BladeAngles {
            beta,
            beta_dot,
            beta_dd,
            zeta,
            zeta_dot,
            zeta_dd,
        },
        geom.omega,
        &er,
        &et,
    );
    let (flap, lag, _) = inertial_hinge(geom, &f, &er, &et, &Vector3::zeros());
    (flap, lag)
}
