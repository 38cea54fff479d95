//! Full-aircraft residual.
//!
//! The residual is affine in the state derivative: `f(y, y_dot, u) =
//! E(y) y_dot + g(y, u)`. Component loads never see `y_dot`, so `E` has a
//! closed form (see [`Vehicle::derivative_matrix`]) and the explicit
//! dynamics only need one 3x3 solve for the moment block.

use nalgebra::{Matrix3, SMatrix, Vector3};

use super::config::VehicleConfig;
use super::controls::ControlVector;
use super::state::*;
use crate::empennage::{surface_loads, surface_velocity};
use crate::error::{Error, Result};
use crate::frames::{body_rates_to_euler_rates, Atmosphere, EulerAngles, GRAVITY, KTS_TO_FTPS};
use crate::fuselage::{force_residual, fuselage_aero_loads, fuselage_alpha_deg, moment_residual, MassProperties};
use crate::loads::{LoadSource, Loads};
use crate::rotor::{flap_residual, inflow_residual, lag_residual, wake_skew, RotorInput, RotorLoads, RotorModel};
use crate::rotor::inflow::inflow_rate_coefficients;
use crate::tables::WakeReceiver;
use crate::tail_rotor::{
    tr_body_loads, tr_inflow_residual, tr_local_velocity, tr_thrust_torque, wake_induced_velocity,
    TailRotorOutput,
};

pub type Residual = nalgebra::SVector<f64, N_STATES>;
pub type MassMatrix = SMatrix<f64, N_STATES, N_STATES>;

/// Summed loads with the per-component breakdown kept for logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalLoads {
    pub total: Loads,
    /// In [`LoadSource::COMPONENTS`] order.
    pub components: [Loads; 5],
}

impl TotalLoads {
    pub fn component(&self, source: LoadSource) -> Option<&Loads> {
        self.components.iter().find(|l| l.source == source)
    }
}

/// Sums the five component loads. Each component must appear exactly once.
pub fn total_loads(parts: &[Loads]) -> Result<TotalLoads> {
    let mut components = [Loads::zero(LoadSource::Total); 5];
    let mut seen = [false; 5];
    for l in parts {
        let i = LoadSource::COMPONENTS
            .iter()
            .position(|s| *s == l.source)
            .ok_or_else(|| Error::Assembly("summed loads passed as a component".into()))?;
        if seen[i] {
            return Err(Error::Assembly(format!("duplicate {} loads", l.source.as_str())));
        }
        seen[i] = true;
        components[i] = *l;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Assembly(format!(
            "missing {} loads",
            LoadSource::COMPONENTS[i].as_str()
        )));
    }
    let mut total = Loads::zero(LoadSource::Total);
    for l in &components {
        total += *l;
    }
    Ok(TotalLoads { total, components })
}

/// Everything computed during one residual evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub residual: Residual,
    pub loads: TotalLoads,
    pub main_rotor: RotorLoads,
    pub tail_rotor: TailRotorOutput,
    /// Wake skew used for the interference lookups (rad).
    pub wake_skew: f64,
    pub stabilator: f64,
}

/// An aircraft at a fixed atmosphere, ready for residual evaluation.
#[derive(Debug, Clone)]
pub struct Vehicle {
    pub config: VehicleConfig,
    pub atmosphere: Atmosphere,
    rotor: RotorModel,
    stubbed: Vec<LoadSource>,
}

impl Vehicle {
    pub fn new(config: VehicleConfig, atmosphere: Atmosphere) -> Result<Self> {
        let rotor = RotorModel::new(config.main_rotor.clone())?;
        config.tail_rotor.validate()?;
        config.horizontal_tail.validate()?;
        config.vertical_tail.validate()?;
        Ok(Self {
            config,
            atmosphere,
            rotor,
            stubbed: Vec::new(),
        })
    }

    pub fn at_altitude(config: VehicleConfig, altitude_ft: f64) -> Result<Self> {
        Self::new(config, Atmosphere::at(altitude_ft)?)
    }

    /// Same aircraft at a different gross weight; inertias are kept.
    pub fn with_gross_weight(mut self, weight_lbf: f64) -> Result<Self> {
        let m = self.config.mass;
        self.config.mass = MassProperties::new(weight_lbf / GRAVITY, m.ixx, m.iyy, m.izz, m.ixy, m.ixz, m.iyz)?;
        self.config.gross_weight = weight_lbf;
        Ok(self)
    }

    /// Replaces a component by one that produces no loads. The main rotor
    /// and tail rotor keep their inflow and blade equations.
    pub fn with_stub(mut self, source: LoadSource) -> Self {
        if !self.stubbed.contains(&source) {
            self.stubbed.push(source);
        }
        self
    }

    pub fn rotor_model(&self) -> &RotorModel {
        &self.rotor
    }

    fn keep(&self, l: Loads) -> Loads {
        if self.stubbed.contains(&l.source) {
            Loads::zero(l.source)
        } else {
            l
        }
    }

    /// Residual of the equations of motion. `t` is accepted for scheduling
    /// and unused: the model is time invariant.
    pub fn system_residual(
        &self,
        y: &SystemState,
        y_dot: &SystemState,
        u: &ControlVector,
        t: f64,
    ) -> Result<Residual> {
        Ok(self.evaluate(y, y_dot, u, t)?.residual)
    }

    pub fn evaluate(
        &self,
        y: &SystemState,
        y_dot: &SystemState,
        u: &ControlVector,
        t: f64,
    ) -> Result<Evaluation> {
        u.check_range()?;
        self.evaluate_unchecked(y, y_dot, u, t)
    }

    /// As [`Vehicle::evaluate`] without the control range check. Solvers
    /// may step outside the rigging while iterating.
    pub(crate) fn evaluate_unchecked(
        &self,
        y: &SystemState,
        y_dot: &SystemState,
        u: &ControlVector,
        _t: f64,
    ) -> Result<Evaluation> {
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("state {} is not finite", STATE_NAMES[i])));
        }
        let cfg = &self.config;
        let atm = &self.atmosphere;
        let rho = atm.density;
        let fs = fuselage_part(y);
        let fd = fuselage_part(y_dot);
        let vel = fs.velocity();
        let rates = fs.rates();
        let lambda = inflow_part(y);
        let blades = rotor_part(y);

        // main rotor
        let mr_input = RotorInput {
            velocity: vel,
            rates,
            controls: cfg.rigging.swashplate(u),
            inflow: lambda,
            blades,
        };
        let mr = self
            .rotor
            .integrate(&mr_input, &cfg.tables.rotor_airfoil, atm)
            .map_err(|e| e.tagged("main rotor"))?;
        let mr_inflow = inflow_residual(
            &lambda,
            &inflow_part(y_dot),
            mr.inflow_forcing,
            mr.mu,
            mr.mu_z,
            cfg.main_rotor.omega,
        )
        .map_err(|e| e.tagged("main rotor inflow"))?;

        // wake interference
        let chi = wake_skew(lambda.lambda0, mr.mu, mr.mu_z).unwrap_or(0.0);
        let tip = cfg.main_rotor.tip_speed();
        let table = &cfg.tables.interference;
        let wake = |r| wake_induced_velocity(lambda.lambda0, tip, y[BETA1C], chi, table, r);

        // tail rotor
        let tr_geom = &cfg.tail_rotor;
        let tr_v = tr_local_velocity(&vel, &rates, tr_geom, &wake(WakeReceiver::TailRotor));
        let tr = tr_thrust_torque(cfg.rigging.tail_collective(u), &tr_v, y[LAMBDA_TR], tr_geom, rho);
        let tr_loads = tr_body_loads(tr.thrust, tr.torque, tr_geom);
        let tr_inflow = tr_inflow_residual(y[LAMBDA_TR], y_dot[LAMBDA_TR], tr.ct, tr.flow_speed, tr_geom);

        // empennage
        let airspeed_kts = vel.norm() / KTS_TO_FTPS;
        let stab = cfg.tables.stabilator.incidence(airspeed_kts);
        let ht = &cfg.horizontal_tail;
        let ht_v = surface_velocity(&vel, &rates, ht, &wake(WakeReceiver::HorizontalTail));
        let ht_loads = surface_loads(&ht_v, ht, stab + ht.incidence, rho, &cfg.tables.tail_airfoil);
        let vt = &cfg.vertical_tail;
        let vt_v = surface_velocity(&vel, &rates, vt, &wake(WakeReceiver::VerticalTail));
        let vt_loads = surface_loads(&vt_v, vt, vt.incidence, rho, &cfg.tables.tail_airfoil);

        let fus_loads = fuselage_aero_loads(&fs, rho, fuselage_alpha_deg(&fs));

        let loads = total_loads(&[
            self.keep(mr.loads),
            self.keep(tr_loads),
            self.keep(ht_loads),
            self.keep(vt_loads),
            self.keep(fus_loads),
        ])?;
        if !loads.total.is_finite() {
            return Err(Error::Numeric("non-finite total loads".into()));
        }

        let mut eps = Residual::zeros();
        let f = force_residual(&fs, &fd, &loads.total, &cfg.mass);
        let m = moment_residual(&fs, &fd, &loads.total, &cfg.mass);
        let (phi_d, theta_d, psi_d) =
            body_rates_to_euler_rates(fs.p, fs.q, fs.r, EulerAngles::new(fs.phi, fs.theta, fs.psi))?;
        let flap = flap_residual(
            &[y_dot[BETA0_DOT], y_dot[BETA1C_DOT], y_dot[BETA1S_DOT]],
            &mr.flap_moments,
            &cfg.main_rotor,
        );
        let lag = lag_residual(
            &[y_dot[ZETA0_DOT], y_dot[ZETA1C_DOT], y_dot[ZETA1S_DOT]],
            &mr.lag_moments,
            &cfg.main_rotor,
        );
        let rows = eps.as_mut_slice();
        rows[U..U + 3].copy_from_slice(&f);
        rows[P..P + 3].copy_from_slice(&m);
        rows[PHI] = fd.phi - phi_d;
        rows[THETA] = fd.theta - theta_d;
        rows[PSI] = fd.psi - psi_d;
        rows[LAMBDA0..LAMBDA0 + 3].copy_from_slice(&mr_inflow);
        rows[LAMBDA_TR] = tr_inflow;
        for k in 0..3 {
            rows[BETA0 + k] = y_dot[BETA0 + k] - y[BETA0_DOT + k];
            rows[ZETA0 + k] = y_dot[ZETA0 + k] - y[ZETA0_DOT + k];
        }
        rows[BETA0_DOT..BETA0_DOT + 3].copy_from_slice(&flap);
        rows[ZETA0_DOT..ZETA0_DOT + 3].copy_from_slice(&lag);

        Ok(Evaluation {
            residual: eps,
            loads,
            main_rotor: mr,
            tail_rotor: tr,
            wake_skew: chi,
            stabilator: stab,
        })
    }

    fn inertia(&self) -> Matrix3<f64> {
        self.config.mass.tensor()
    }

    /// Analytic `E = d(residual)/d(y_dot)` at state `y`. Only the tail-rotor
    /// inflow row depends on the state, through its time constant.
    pub fn derivative_matrix(&self, y: &SystemState, u: &ControlVector) -> Result<MassMatrix> {
        let ev = self.evaluate(y, &SystemState::zeros(), u, 0.0)?;
        Ok(self.derivative_matrix_from(&ev))
    }

    fn derivative_matrix_from(&self, ev: &Evaluation) -> MassMatrix {
        let mut e = MassMatrix::identity();
        let m = self.config.mass.mass;
        for i in U..U + 3 {
            e[(i, i)] = -m;
        }
        e.fixed_view_mut::<3, 3>(P, P).copy_from(&(-self.inertia()));
        let c = inflow_rate_coefficients(self.config.main_rotor.omega);
        for k in 0..3 {
            e[(LAMBDA0 + k, LAMBDA0 + k)] = c[k];
        }
        e[(LAMBDA_TR, LAMBDA_TR)] = self.config.tail_rotor.inflow_time_constant(ev.tail_rotor.flow_speed);
        e
    }

    /// Explicit dynamics: the `y_dot` that zeroes the residual.
    pub fn state_derivative(&self, y: &SystemState, u: &ControlVector) -> Result<(SystemState, Evaluation)> {
        let ev = self.evaluate(y, &SystemState::zeros(), u, 0.0)?;
        let g = &ev.residual;
        let m = self.config.mass.mass;
        let mut yd = SystemState::zeros();
        for i in U..U + 3 {
            yd[i] = g[i] / m;
        }
        let mom = Vector3::new(g[P], g[Q], g[R]);
        let rate_dot = self
            .inertia()
            .lu()
            .solve(&mom)
            .ok_or_else(|| Error::Numeric("singular inertia tensor".into()))?;
        yd.as_mut_slice()[P..P + 3].copy_from_slice(rate_dot.as_slice());
        let c = inflow_rate_coefficients(self.config.main_rotor.omega);
        for k in 0..3 {
            yd[LAMBDA0 + k] = -g[LAMBDA0 + k] / c[k];
        }
        yd[LAMBDA_TR] = -g[LAMBDA_TR] / self.config.tail_rotor.inflow_time_constant(ev.tail_rotor.flow_speed);
        for i in [PHI, THETA, PSI] {
            yd[i] = -g[i];
        }
        for i in BETA0..N_STATES {
            yd[i] = -g[i];
        }
        Ok((yd, ev))
    }
}
