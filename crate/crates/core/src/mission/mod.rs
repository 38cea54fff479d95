//! Closed-loop ship approach and landing.
//!
//! Each phase has its own trim, linear model and LQR gains. An outer
//! guidance loop compares the earth position and heading with the planned
//! trajectory and turns the errors into the four tracked outputs of the
//! active phase: heading-frame forward, lateral and sink velocity plus
//! heading rate.

pub mod autopilot;
pub mod integrate;
pub mod log;
pub mod plan;
pub mod scenario;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::frames::{Atmosphere, FT_TO_M, KTS_TO_FTPS};
use crate::loads::LoadSource;
use crate::trim::FlightCondition;
use crate::vehicle::state::PSI;
use crate::vehicle::{ControlVector, Evaluation, SystemState, Vehicle};

pub use autopilot::{slew, tracked_outputs, PhaseController, TRACKED_OUTPUTS};
pub use integrate::{earth_velocity, integrate_step, update_position};
pub use log::{log_columns, FlightLog, LogRecord};
pub use plan::{wrap_angle, FlightPlan, PhaseKind, Reference, ShipState};
pub use scenario::{Scenario, Weights};

const MPS_TO_KTS: f64 = 1.0 / (KTS_TO_FTPS * FT_TO_M);

/// When the active phase hands over to the next one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExitCondition {
    /// Mission time reaches the value (s).
    Time(f64),
    /// Gear on the deck; failure after the deadline (s).
    Touchdown { deadline: f64 },
}

#[derive(Debug, Clone)]
pub struct MissionPhase {
    pub kind: PhaseKind,
    pub condition: FlightCondition,
    pub controller: PhaseController,
    /// Entry time (s).
    pub lead_time: f64,
    pub exit: ExitCondition,
}

impl MissionPhase {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }
}

/// Outer loop: position-error integrators and gains.
#[derive(Debug, Clone)]
pub struct Guidance {
    cfg: scenario::GuidanceSection,
    integral: Vector3<f64>,
}

impl Guidance {
    pub fn new(cfg: scenario::GuidanceSection) -> Self {
        Self {
            cfg,
            integral: Vector3::zeros(),
        }
    }

    /// Tracked-output targets (ft/s, rad/s) for reference `r`.
    pub fn targets(&mut self, r: &Reference, position: &Vector3<f64>, heading: f64, dt: f64) -> [f64; 4] {
        let c = &self.cfg;
        let (s, co) = heading.sin_cos();
        let to_heading = |v: &Vector3<f64>| Vector3::new(co * v[0] + s * v[1], -s * v[0] + co * v[1], v[2]);
        let err = to_heading(&(r.position - position));
        let vref = to_heading(&r.velocity);

        let cap = c.max_correction_mps;
        let limits = Vector3::new(
            cap / c.integral_gain.max(1e-9),
            cap / c.integral_gain.max(1e-9),
            cap / c.height_integral_gain.max(1e-9),
        );
        // integrators live in the heading frame and turn with the aircraft
        self.integral = (self.integral + err * dt).zip_map(&limits, |v, l| v.clamp(-l, l));
        let mut horiz = err.xy() * c.position_gain + self.integral.xy() * c.integral_gain;
        if horiz.norm() > cap {
            horiz *= cap / horiz.norm();
        }
        let vert = (err[2] * c.height_gain + self.integral[2] * c.height_integral_gain).clamp(-cap, cap);
        let heading_rate = r.heading_rate + c.heading_gain * wrap_angle(r.heading - heading);
        [
            (vref[0] + horiz[0]) / FT_TO_M,
            (vref[1] + horiz[1]) / FT_TO_M,
            (vref[2] + vert) / FT_TO_M,
            heading_rate,
        ]
    }
}

/// Result of a touchdown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandingReport {
    pub time: f64,
    /// Ship minus helicopter at touchdown (m): x, y, and height with the
    /// gear offset removed, positive when the gear is above the deck.
    pub error: [f64; 3],
    pub sink_rate: f64,
    pub horizontal_miss: f64,
    pub on_deck: bool,
}

#[derive(Debug, Clone)]
pub struct MissionRun {
    pub plan: FlightPlan,
    pub log: FlightLog,
    pub report: Option<LandingReport>,
    /// Why the mission failed, if it did. The log runs up to the failure.
    pub failure: Option<String>,
}

impl MissionRun {
    /// The landing report, or the failure as an error.
    pub fn landing(&self) -> Result<LandingReport> {
        match (&self.failure, &self.report) {
            (None, Some(r)) => Ok(*r),
            (Some(f), _) => Err(Error::Mission(f.clone())),
            (None, None) => Err(Error::Mission("no touchdown".into())),
        }
    }

    /// Landing report as `key = value` lines.
    pub fn report_text(&self) -> String {
        let mut s = String::new();
        match (&self.failure, &self.report) {
            (None, Some(r)) => {
                s.push_str("status = \"landed\"\n");
                s.push_str(&format!("touchdown_time_s = {:.8e}\n", r.time));
                s.push_str(&format!("error_x_m = {:.8e}\n", r.error[0]));
                s.push_str(&format!("error_y_m = {:.8e}\n", r.error[1]));
                s.push_str(&format!("error_z_m = {:.8e}\n", r.error[2]));
                s.push_str(&format!("sink_rate_mps = {:.8e}\n", r.sink_rate));
                s.push_str(&format!("horizontal_miss_m = {:.8e}\n", r.horizontal_miss));
                s.push_str(&format!("on_deck = {}\n", r.on_deck));
            }
            (f, _) => {
                let why = f.clone().unwrap_or_else(|| "no touchdown".into());
                s.push_str("status = \"failed\"\n");
                s.push_str(&format!("reason = {why:?}\n"));
            }
        }
        s.push_str(&format!("planned_duration_s = {:.8e}\n", self.plan.planned_duration()));
        s
    }
}

/// Relative position at the logged touchdown (m). Z is positive up and
/// measured from the deck to the gear, which sits `gear_offset` below the CG.
pub fn landing_error(log: &FlightLog, ship: &ShipState, gear_offset: f64) -> Result<[f64; 3]> {
    let i = log
        .touchdown
        .ok_or_else(|| Error::Mission("log has no touchdown".into()))?;
    let rec = &log.records[i];
    let pad = ship.at(rec.time);
    let d = pad - rec.position;
    Ok([d[0], d[1], -(d[2] - gear_offset)])
}

/// Phases, gains and initial condition ready to fly.
#[derive(Debug, Clone)]
pub struct Mission {
    pub scenario: Scenario,
    pub vehicle: Vehicle,
    pub plan: FlightPlan,
    pub phases: Vec<MissionPhase>,
    pub initial_state: SystemState,
    pub initial_controls: ControlVector,
}

fn condition(speed_mps: f64, sink_mps: f64, turn_rate: f64, s: &Scenario) -> FlightCondition {
    FlightCondition {
        airspeed_kts: speed_mps.hypot(sink_mps) * MPS_TO_KTS,
        flight_path_angle: -sink_mps.atan2(speed_mps),
        turn_rate,
        gross_weight: s.aircraft.gross_weight_lbf,
        altitude: s.aircraft.altitude_ft,
    }
}

impl Mission {
    /// Plans the approach and designs every phase controller.
    pub fn prepare(scenario: &Scenario, base: &Vehicle) -> Result<Self> {
        scenario.timing.substeps()?;
        let mut vehicle = base.clone().with_gross_weight(scenario.aircraft.gross_weight_lbf)?;
        vehicle.atmosphere = Atmosphere::at(scenario.aircraft.altitude_ft)?;
        let plan = FlightPlan::new(scenario.approach_inputs(), scenario.ship_state()?)?;
        let inputs = &plan.inputs;
        let v = inputs.speed;
        let vs = plan.ship.speed();
        let weights = scenario.weights();

        let conditions = [
            condition(v, inputs.descent_rate, 0.0, scenario),
            condition(v, 0.0, 0.0, scenario),
            condition(v, 0.0, plan.turn_rate, scenario),
            condition(0.5 * (v + vs), 0.0, 0.0, scenario),
            condition(vs, inputs.landing_descent_rate, 0.0, scenario),
        ];
        // continuation from the cruise trim
        let cruise = PhaseController::design(PhaseKind::ForwardFlight, &conditions[1], &vehicle, &weights[1], None)?;
        let mut controllers = Vec::with_capacity(5);
        for kind in PhaseKind::ALL {
            let i = kind.index();
            let c = if kind == PhaseKind::ForwardFlight {
                cruise.clone()
            } else {
                let seed = if kind == PhaseKind::FinalLanding {
                    controllers.get(3).map(|c: &PhaseController| &c.trim)
                } else {
                    Some(&cruise.trim)
                };
                PhaseController::design(kind, &conditions[i], &vehicle, &weights[i], seed)?
            };
            controllers.push(c);
        }
        let deadline = plan.planned_duration() + scenario.landing.timeout_margin_s;
        let phases = controllers
            .into_iter()
            .zip(conditions)
            .map(|(controller, condition)| {
                let seg = plan.segment(controller.kind);
                MissionPhase {
                    kind: controller.kind,
                    condition,
                    lead_time: seg.start,
                    exit: if controller.kind == PhaseKind::FinalLanding {
                        ExitCondition::Touchdown { deadline }
                    } else {
                        ExitCondition::Time(seg.end())
                    },
                    controller,
                }
            })
            .collect::<Vec<_>>();

        let mut initial_state = phases[1].controller.trim.state;
        initial_state[PSI] = inputs.entry_heading;
        let initial_controls = phases[1].controller.trim.controls;
        Ok(Self {
            scenario: scenario.clone(),
            vehicle,
            plan,
            phases,
            initial_state,
            initial_controls,
        })
    }

    /// Flies the mission to touchdown or failure.
    pub fn run(&self) -> MissionRun {
        let timing = &self.scenario.timing;
        let dt_c = timing.control_period();
        let substeps = timing.substeps().expect("checked in prepare");
        let dt = dt_c / substeps as f64;
        let max_step = timing.slew_limit_pct_per_s * dt_c;
        let gear = self.scenario.helicopter.gear_offset_m;
        let ship = self.plan.ship;

        let mut guidance = Guidance::new(self.scenario.guidance.clone());
        let mut log = FlightLog::new(dt_c);
        let mut y = self.initial_state;
        let mut pos = self.plan.inputs.start;
        let mut u = self.initial_controls;
        let mut active = 0;
        let mut step: u64 = 0;

        let record = |t: f64, kind: PhaseKind, y: &SystemState, u: &ControlVector, pos: &Vector3<f64>, ev: &Evaluation| {
            LogRecord {
                time: t,
                phase: kind,
                state: *y,
                controls: *u,
                position: *pos,
                relative: ship.at(t) - pos,
                loads: LoadSource::COMPONENTS.map(|s| *ev.loads.component(s).expect("all sources present")),
            }
        };
        let finish = |log: FlightLog, report: Option<LandingReport>, failure: Option<String>| MissionRun {
            plan: self.plan.clone(),
            log,
            report,
            failure,
        };

        loop {
            let t = step as f64 * dt_c;
            while let ExitCondition::Time(end) = self.phases[active].exit {
                if t + 1e-9 >= end {
                    active += 1;
                } else {
                    break;
                }
            }
            let phase = &self.phases[active];
            if let ExitCondition::Touchdown { deadline } = phase.exit {
                if t > deadline {
                    return finish(log, None, Some(format!("no touchdown by t={deadline:.1}s")));
                }
            }

            let r = self.plan.reference(phase.kind, t);
            let targets = guidance.targets(&r, &pos, y[PSI], dt_c);
            let cmd = phase.controller.command(&y, &targets);
            u = slew(&u, &cmd.controls, max_step);

            let mut first = None;
            for _ in 0..substeps {
                match integrate::checked_rk4(&self.vehicle, &y, &pos, &u, dt).and_then(|s| {
                    autopilot::check_state(&s.0)?;
                    Ok(s)
                }) {
                    Ok((yn, pn, ev)) => {
                        if first.is_none() {
                            first = Some(record(t, phase.kind, &y, &u, &pos, &ev));
                        }
                        y = yn;
                        pos = pn;
                    }
                    Err(e) => {
                        let err = Error::Divergence {
                            time: t,
                            phase: phase.name().into(),
                            reason: e.to_string(),
                        };
                        return finish(log, None, Some(err.to_string()));
                    }
                }
            }
            log.records.extend(first);
            step += 1;

            let t = step as f64 * dt_c;
            let deck = ship.at(t);
            if pos[2] + gear >= deck[2] {
                let sink = integrate::sink_rate(&y).unwrap_or(f64::NAN);
                let ev = match self.vehicle.state_derivative(&y, &u) {
                    Ok((_, ev)) => ev,
                    Err(e) => return finish(log, None, Some(e.to_string())),
                };
                log.records.push(record(t, phase.kind, &y, &u, &pos, &ev));
                let miss = (deck.xy() - pos.xy()).norm();
                if phase.kind != PhaseKind::FinalLanding {
                    return finish(log, None, Some(format!("descended to deck height during {}", phase.name())));
                }
                if !(sink < self.scenario.landing.max_touchdown_rate_mps) {
                    return finish(log, None, Some(format!("hard landing at {sink:.2} m/s")));
                }
                if miss > ship.landing_radius {
                    return finish(log, None, Some(format!("missed deck by {miss:.2} m")));
                }
                log.touchdown = Some(log.records.len() - 1);
                let error = landing_error(&log, &ship, gear).expect("touchdown just set");
                let report = LandingReport {
                    time: t,
                    error,
                    sink_rate: sink,
                    horizontal_miss: miss,
                    on_deck: true,
                };
                return finish(log, Some(report), None);
            }
        }
    }
}

/// Plans, designs and flies a scenario.
pub fn run_mission(scenario: &Scenario, vehicle: &Vehicle) -> Result<MissionRun> {
    Ok(Mission::prepare(scenario, vehicle)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loads::Loads;

    fn log_at(position: Vector3<f64>, time: f64) -> FlightLog {
        FlightLog {
            interval: 0.02,
            records: vec![LogRecord {
                time,
                phase: PhaseKind::FinalLanding,
                state: SystemState::zeros(),
                controls: ControlVector::neutral(),
                position,
                relative: Vector3::zeros(),
                loads: LoadSource::COMPONENTS.map(Loads::zero),
            }],
            touchdown: Some(0),
        }
    }

    fn ship() -> ShipState {
        ShipState::new(Vector3::new(100.0, -88.0, -5.0), Vector3::new(5.144, 0.0, 0.0), 6.0).unwrap()
    }

    #[test]
    fn on_the_pad_is_zero_error() {
        let s = ship();
        let t = 12.0;
        let pad = s.at(t);
        let e = landing_error(&log_at(pad - Vector3::new(0.0, 0.0, 0.4826), t), &s, 0.4826).unwrap();
        for v in e {
            assert!(v.abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn lateral_offset_shows_in_y() {
        let s = ship();
        let pad = s.at(3.0);
        let e = landing_error(&log_at(pad + Vector3::new(0.0, -1.0, -0.4826), 3.0), &s, 0.4826).unwrap();
        assert!((e[1] - 1.0).abs() < 1e-12 && e[0].abs() < 1e-12 && e[2].abs() < 1e-12);
    }

    #[test]
    fn no_touchdown_is_an_error() {
        let mut log = log_at(Vector3::zeros(), 0.0);
        log.touchdown = None;
        assert!(landing_error(&log, &ship(), 0.4826).is_err());
    }
}
