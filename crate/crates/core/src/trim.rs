//! Steady-flight trim by damped Newton iteration.
//!
//! Sixteen unknowns: the four controls, roll and pitch attitude, the four
//! inflow states and the six flap and lag harmonics. Heading is fixed at
//! zero, the flight path points along earth x, and body rates follow from
//! the prescribed turn rate. The sixteen constraints are the force, moment,
//! inflow and blade dynamic rows of the residual; the remaining kinematic
//! rows hold by construction.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::frames::{body_velocity_on_path, Atmosphere, EulerAngles, HP, KTS_TO_FTPS};
use crate::vehicle::state::*;
use crate::vehicle::{ControlVector, Evaluation, Vehicle};

pub const N_UNKNOWNS: usize = 16;

pub const TRIM_UNKNOWNS: [&str; N_UNKNOWNS] = [
    "collective", "lateral", "longitudinal", "pedal", "phi", "theta", "lambda0", "lambda1c",
    "lambda1s", "lambda_tr", "beta0", "beta1c", "beta1s", "zeta0", "zeta1c", "zeta1s",
];

// state slots of unknowns 4.. (the first four are controls)
const STATE_SLOTS: [usize; N_UNKNOWNS - 4] = [
    PHI, THETA, LAMBDA0, LAMBDA1C, LAMBDA1S, LAMBDA_TR, BETA0, BETA1C, BETA1S, ZETA0, ZETA1C, ZETA1S,
];

/// Residual rows driven to zero by the solver.
pub const TRIM_ROWS: [usize; N_UNKNOWNS] = [
    U, V, W, P, Q, R, LAMBDA0, LAMBDA1C, LAMBDA1S, LAMBDA_TR, BETA0_DOT, BETA1C_DOT, BETA1S_DOT,
    ZETA0_DOT, ZETA1C_DOT, ZETA1S_DOT,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightCondition {
    pub airspeed_kts: f64,
    /// Flight-path angle, positive climbing (rad).
    pub flight_path_angle: f64,
    /// Earth-axis turn rate, positive right (rad/s).
    pub turn_rate: f64,
    pub gross_weight: f64,
    pub altitude: f64,
}

impl FlightCondition {
    pub fn level(airspeed_kts: f64, gross_weight: f64, altitude: f64) -> Self {
        Self {
            airspeed_kts,
            flight_path_angle: 0.0,
            turn_rate: 0.0,
            gross_weight,
            altitude,
        }
    }

    pub fn hover(gross_weight: f64, altitude: f64) -> Self {
        Self::level(0.0, gross_weight, altitude)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.airspeed_kts >= 0.0 && self.airspeed_kts.is_finite()) {
            return Err(Error::InvalidArgument(format!("airspeed {} kts", self.airspeed_kts)));
        }
        if !(self.gross_weight > 0.0 && self.gross_weight.is_finite()) {
            return Err(Error::InvalidArgument(format!("gross weight {} lbf", self.gross_weight)));
        }
        if !(self.flight_path_angle.is_finite() && self.turn_rate.is_finite()) {
            return Err(Error::InvalidArgument("flight path or turn rate not finite".into()));
        }
        Ok(())
    }

    pub fn speed_ftps(&self) -> f64 {
        self.airspeed_kts * KTS_TO_FTPS
    }
}

/// Unknown and constraint names for a condition. The layout does not
/// change with the condition; only the prescribed kinematics do.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimLayout {
    pub unknowns: [&'static str; N_UNKNOWNS],
    pub constraints: [&'static str; N_UNKNOWNS],
    /// Prescribed flight speed along the path (ft/s).
    pub speed: f64,
    pub flight_path_angle: f64,
    pub turn_rate: f64,
}

pub fn trim_unknowns(condition: &FlightCondition) -> Result<TrimLayout> {
    condition.validate()?;
    Ok(TrimLayout {
        unknowns: TRIM_UNKNOWNS,
        constraints: TRIM_ROWS.map(|i| RESIDUAL_NAMES[i]),
        speed: condition.speed_ftps(),
        flight_path_angle: condition.flight_path_angle,
        turn_rate: condition.turn_rate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Central-difference step on angles and inflow states.
    pub angle_step: f64,
    /// Central-difference step on controls (percent).
    pub control_step: f64,
    pub max_halvings: usize,
}

impl Default for TrimOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            tolerance: 1e-8,
            angle_step: 1e-5,
            control_step: 1e-3,
            max_halvings: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrimResult {
    pub condition: FlightCondition,
    pub state: SystemState,
    /// State derivative at trim: zero except the heading rate in a turn.
    pub state_rate: SystemState,
    pub controls: ControlVector,
    /// Infinity norm of the full residual.
    pub residual_norm: f64,
    pub power_hp: f64,
    pub iterations: usize,
    pub evaluation: Evaluation,
}

impl TrimResult {
    /// Unknown vector, usable as a seed for a nearby condition.
    pub fn unknowns(&self) -> [f64; N_UNKNOWNS] {
        let mut x = [0.0; N_UNKNOWNS];
        x[..4].copy_from_slice(&self.controls.to_array());
        for (k, &i) in STATE_SLOTS.iter().enumerate() {
            x[4 + k] = self.state[i];
        }
        x
    }
}

/// Starting point for hover at the vehicle's weight.
pub fn hover_seed(vehicle: &Vehicle) -> [f64; N_UNKNOWNS] {
    let g = &vehicle.config.main_rotor;
    let rho = vehicle.atmosphere.density;
    let vh = (vehicle.config.gross_weight / (2.0 * rho * g.disk_area())).sqrt();
    let mut x = [0.0; N_UNKNOWNS];
    x[..4].copy_from_slice(&[80.0, 50.0, 50.0, 50.0]);
    x[4] = -0.03;
    x[5] = 0.05;
    x[6] = vh / g.tip_speed();
    x[9] = 0.05;
    x[10] = 0.05;
    x
}

struct Problem<'a> {
    vehicle: &'a Vehicle,
    layout: TrimLayout,
}

impl Problem<'_> {
    fn state(&self, x: &[f64]) -> (SystemState, SystemState, ControlVector) {
        let u = ControlVector::from_slice(&x[..4]);
        let mut y = SystemState::zeros();
        for (k, &i) in STATE_SLOTS.iter().enumerate() {
            y[i] = x[4 + k];
        }
        let angles = EulerAngles::new(y[PHI], y[THETA], 0.0);
        let v = body_velocity_on_path(self.layout.speed, self.layout.flight_path_angle, angles);
        let om = self.layout.turn_rate;
        let (sf, cf) = angles.phi.sin_cos();
        let (st, ct) = angles.theta.sin_cos();
        y[U] = v.x;
        y[V] = v.y;
        y[W] = v.z;
        y[P] = -st * om;
        y[Q] = sf * ct * om;
        y[R] = cf * ct * om;
        let mut yd = SystemState::zeros();
        yd[PSI] = om;
        (y, yd, u)
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        let (y, yd, u) = self.state(x);
        self.vehicle.evaluate_unchecked(&y, &yd, &u, 0.0)
    }

    fn rows(ev: &Evaluation) -> DVector<f64> {
        DVector::from_iterator(N_UNKNOWNS, TRIM_ROWS.iter().map(|&i| ev.residual[i]))
    }

    // Merit weights bring lbf, ft*lbf, inflow and 1/s^2 rows to similar size.
    fn weights(&self) -> DVector<f64> {
        let w = self.vehicle.config.gross_weight;
        let om2 = self.vehicle.config.main_rotor.omega.powi(2);
        DVector::from_iterator(
            N_UNKNOWNS,
            TRIM_ROWS.iter().map(|&i| match i {
                U | V | W => 1.0 / w,
                P | Q | R => 1.0 / (10.0 * w),
                LAMBDA0..=LAMBDA_TR => 1.0,
                _ => 1.0 / om2,
            }),
        )
    }
}

/// `base` re-weighted and moved to the condition's altitude.
pub fn vehicle_for(condition: &FlightCondition, base: &Vehicle) -> Result<Vehicle> {
    let mut vehicle = base.clone().with_gross_weight(condition.gross_weight)?;
    if vehicle.atmosphere.altitude != condition.altitude {
        vehicle.atmosphere = Atmosphere::at(condition.altitude)?;
    }
    Ok(vehicle)
}

/// Solves for the trim at `condition`. `seed` defaults to [`hover_seed`].
pub fn solve_trim(
    condition: &FlightCondition,
    vehicle: &Vehicle,
    seed: Option<&[f64; N_UNKNOWNS]>,
    options: &TrimOptions,
) -> Result<TrimResult> {
    let layout = trim_unknowns(condition)?;
    let vehicle = vehicle_for(condition, vehicle)?;
    let problem = Problem { vehicle: &vehicle, layout };
    let weights = problem.weights();
    let merit = |r: &DVector<f64>| r.component_mul(&weights).norm();

    let mut x = DVector::from_row_slice(&seed.copied().unwrap_or_else(|| hover_seed(&vehicle)));
    let mut ev = problem.evaluate(x.as_slice())?;
    let mut r = Problem::rows(&ev);
    let steps = DVector::from_iterator(
        N_UNKNOWNS,
        (0..N_UNKNOWNS).map(|j| if j < 4 { options.control_step } else { options.angle_step }),
    );

    for iteration in 0..=options.max_iterations {
        let norm = ev.residual.amax();
        if norm < options.tolerance {
            let (state, state_rate, controls) = problem.state(x.as_slice());
            controls.check_range()?;
            return Ok(TrimResult {
                condition: *condition,
                state,
                state_rate,
                controls,
                residual_norm: norm,
                power_hp: ev.main_rotor.power / HP,
                iterations: iteration,
                evaluation: ev,
            });
        }
        if iteration == options.max_iterations {
            break;
        }

        let mut jac = DMatrix::zeros(N_UNKNOWNS, N_UNKNOWNS);
        for j in 0..N_UNKNOWNS {
            let h = steps[j];
            let mut xp = x.clone();
            xp[j] += h;
            let rp = Problem::rows(&problem.evaluate(xp.as_slice())?);
            xp[j] -= 2.0 * h;
            let rm = Problem::rows(&problem.evaluate(xp.as_slice())?);
            jac.set_column(j, &((rp - rm) / (2.0 * h)));
        }
        let dx = match jac.clone().lu().solve(&(-&r)) {
            Some(dx) if dx.iter().all(|v| v.is_finite()) => dx,
            _ => jac
                .svd(true, true)
                .solve(&(-&r), 1e-12)
                .map_err(|e| Error::Numeric(format!("trim jacobian: {e}")))?,
        };

        // halve on merit increase; if nothing improves, keep the best try
        let m0 = merit(&r);
        let mut best: Option<(f64, DVector<f64>, Evaluation, DVector<f64>)> = None;
        let mut step = 1.0;
        for _ in 0..=options.max_halvings {
            let xn = &x + &dx * step;
            if let Ok(evn) = problem.evaluate(xn.as_slice()) {
                let rn = Problem::rows(&evn);
                let m = merit(&rn);
                if best.as_ref().map_or(true, |b| m < b.0) {
                    best = Some((m, xn, evn, rn));
                }
                if m < m0 {
                    break;
                }
            }
            step *= 0.5;
        }
        let (_, xn, evn, rn) = best.ok_or_else(|| Error::NonConvergence {
            iterations: iteration + 1,
            residual: norm,
        })?;
        x = xn;
        ev = evn;
        r = rn;
    }
    Err(Error::NonConvergence {
        iterations: options.max_iterations,
        residual: ev.residual.amax(),
    })
}

/// One row of a speed sweep. Failed points keep the error text.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub speed_kts: f64,
    pub result: std::result::Result<TrimResult, String>,
}

/// Trims at each speed in ascending order, seeding every point with the
/// previous converged one. A failed point is retried once from the hover
/// seed, then recorded and skipped.
pub fn trim_sweep(
    speeds: &[f64],
    template: &FlightCondition,
    vehicle: &Vehicle,
    options: &TrimOptions,
) -> Result<Vec<SweepPoint>> {
    if speeds.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("sweep speeds must be strictly ascending".into()));
    }
    let mut seed: Option<[f64; N_UNKNOWNS]> = None;
    let mut out = Vec::with_capacity(speeds.len());
    for &speed in speeds {
        let condition = FlightCondition { airspeed_kts: speed, ..*template };
        let mut result = solve_trim(&condition, vehicle, seed.as_ref(), options);
        if result.is_err() && seed.is_some() {
            result = solve_trim(&condition, vehicle, None, options);
        }
        if let Ok(t) = &result {
            seed = Some(t.unknowns());
        }
        out.push(SweepPoint {
            speed_kts: speed,
            result: result.map_err(|e| e.to_string()),
        });
    }
    Ok(out)
}

pub const SWEEP_COLUMNS: [&str; 14] = [
    "speed_kts", "power_hp", "theta_F_deg", "phi_F_deg", "beta0_deg", "beta1c_deg", "beta1s_deg",
    "zeta0_deg", "col_pct", "lat_pct", "lon_pct", "ped_pct", "residual_norm", "iterations",
];

fn sweep_row(t: &TrimResult) -> [f64; 13] {
    let y = &t.state;
    let c = t.controls;
    [
        t.condition.airspeed_kts,
        t.power_hp,
        y[THETA].to_degrees(),
        y[PHI].to_degrees(),
        y[BETA0].to_degrees(),
        y[BETA1C].to_degrees(),
        y[BETA1S].to_degrees(),
        y[ZETA0].to_degrees(),
        c.collective,
        c.lateral,
        c.longitudinal,
        c.pedal,
        t.residual_norm,
    ]
}

/// Writes a sweep as CSV. Failed points appear with NaN values.
pub fn write_sweep_csv<W: std::io::Write>(points: &[SweepPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Numeric(format!("writing sweep: {e}"));
    w.write_record(SWEEP_COLUMNS).map_err(err)?;
    for p in points {
        let mut rec: Vec<String> = Vec::with_capacity(SWEEP_COLUMNS.len());
        match &p.result {
            Ok(t) => {
                rec.extend(sweep_row(t).iter().map(|v| format!("{v:.8e}")));
                rec.push(t.iterations.to_string());
            }
            Err(_) => {
                rec.push(format!("{:.8e}", p.speed_kts));
                rec.extend(std::iter::repeat("NaN".to_string()).take(12));
                rec.push("-1".into());
            }
        }
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Numeric(format!("writing sweep: {e}")))
}

/// Writes a single trim point as a one-row sweep CSV.
pub fn write_trim_csv<W: std::io::Write>(t: &TrimResult, out: W) -> Result<()> {
    write_sweep_csv(
        &[SweepPoint {
            speed_kts: t.condition.airspeed_kts,
            result: Ok(t.clone()),
        }],
        out,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vehicle::VehicleConfig;

    #[test]
    fn layout() {
        let l = trim_unknowns(&FlightCondition::level(100.0, 16000.0, 5250.0)).unwrap();
        assert!((l.speed - 168.78).abs() < 0.01);
        assert_eq!(l.unknowns.len(), 16);
        assert_eq!(l.constraints[0], "force_x");
        assert!(trim_unknowns(&FlightCondition::level(-1.0, 16000.0, 0.0)).is_err());
        assert!(trim_unknowns(&FlightCondition::level(10.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn sweep_rejects_unsorted_speeds() {
        let v = Vehicle::at_altitude(VehicleConfig::default(), 0.0).unwrap();
        let c = FlightCondition::hover(16000.0, 0.0);
        assert!(trim_sweep(&[10.0, 0.0], &c, &v, &TrimOptions::default()).is_err());
    }
}
