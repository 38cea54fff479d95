//! Reference trajectory for the ship approach.
//!
//! The approach is flown as a straight entry leg on a heading offset from
//! the ship's track (descending first, then level), one constant-rate turn
//! that rolls out on the ship's track line, a deceleration with a linear
//! speed ramp that ends exactly over the moving deck, and a constant-rate
//! descent onto the deck. The entry-leg length and the deceleration time
//! follow from the geometry, so only the entry heading, turn rate and the
//! descent profile are free.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Constant-velocity landing platform. Position is the pad centre on the
/// deck (m, NED, so z is minus the deck height).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShipState {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub landing_radius: f64,
}

impl ShipState {
    pub fn new(position: Vector3<f64>, velocity: Vector3<f64>, landing_radius: f64) -> Result<Self> {
        if velocity[2] != 0.0 {
            return Err(Error::Config("ship cannot climb or sink".into()));
        }
        if !(landing_radius > 0.0) {
            return Err(Error::Config(format!("landing radius {landing_radius} m")));
        }
        Ok(Self {
            position,
            velocity,
            landing_radius,
        })
    }

    /// Pad centre at time `t`.
    pub fn at(&self, t: f64) -> Vector3<f64> {
        self.position + self.velocity * t
    }

    /// Deck height above the earth-frame origin (m, positive up).
    pub fn deck_height(&self) -> f64 {
        -self.position[2]
    }

    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseKind {
    InitialDescent,
    ForwardFlight,
    CoordinatedTurn,
    Deceleration,
    FinalLanding,
}

impl PhaseKind {
    pub const ALL: [PhaseKind; 5] = [
        PhaseKind::InitialDescent,
        PhaseKind::ForwardFlight,
        PhaseKind::CoordinatedTurn,
        PhaseKind::Deceleration,
        PhaseKind::FinalLanding,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PhaseKind::InitialDescent => "initial descent",
            PhaseKind::ForwardFlight => "steady forward flight",
            PhaseKind::CoordinatedTurn => "steady coordinated turn",
            PhaseKind::Deceleration => "deceleration",
            PhaseKind::FinalLanding => "final landing",
        }
    }

    pub fn index(&self) -> usize {
        *self as usize
    }
}

/// Reference point on the trajectory. Earth frame, meters, NED.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub heading: f64,
    pub heading_rate: f64,
}

/// Free parameters of the approach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproachInputs {
    pub start: Vector3<f64>,
    /// Ground speed on the entry leg (m/s).
    pub speed: f64,
    /// Entry-leg heading (rad).
    pub entry_heading: f64,
    pub descent_rate: f64,
    pub descent_time: f64,
    /// Turn rate magnitude (rad/s); the direction comes from the geometry.
    pub turn_rate: f64,
    pub landing_descent_rate: f64,
    /// CG height above the gear (m).
    pub gear_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub kind: PhaseKind,
    /// Lead time: when the phase is entered (s).
    pub start: f64,
    /// Planned length (s). For the final landing this is the time for the
    /// gear to reach the deck.
    pub duration: f64,
    pub position: Vector3<f64>,
    pub heading: f64,
    /// Ground speed at segment start (m/s).
    pub speed: f64,
}

impl Segment {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlightPlan {
    pub inputs: ApproachInputs,
    pub ship: ShipState,
    pub segments: [Segment; 5],
    /// Signed turn rate (rad/s, positive right).
    pub turn_rate: f64,
}

pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

fn dir(psi: f64) -> Vector3<f64> {
    Vector3::new(psi.cos(), psi.sin(), 0.0)
}

// horizontal displacement of a constant-speed turn from psi0 to psi0 + rate*tau
fn arc(speed: f64, rate: f64, psi0: f64, tau: f64) -> Vector3<f64> {
    if rate == 0.0 {
        return dir(psi0) * (speed * tau);
    }
    let psi = psi0 + rate * tau;
    Vector3::new(psi.sin() - psi0.sin(), -(psi.cos() - psi0.cos()), 0.0) * (speed / rate)
}

impl FlightPlan {
    pub fn new(inputs: ApproachInputs, ship: ShipState) -> Result<Self> {
        let i = &inputs;
        let v = i.speed;
        let vs = ship.speed();
        if !(v > vs) {
            return Err(Error::Config(format!(
                "approach speed {v:.2} m/s must exceed ship speed {vs:.2} m/s"
            )));
        }
        if !(i.turn_rate > 0.0 && i.descent_rate >= 0.0 && i.descent_time >= 0.0 && i.landing_descent_rate > 0.0) {
            return Err(Error::Config("turn rate and descent rates must be positive".into()));
        }
        let track = if vs > 0.0 {
            ship.velocity[1].atan2(ship.velocity[0])
        } else {
            0.0
        };
        let turn = wrap_angle(track - i.entry_heading);
        if turn.abs() < 1e-6 {
            return Err(Error::Config("entry heading must differ from the ship's track".into()));
        }
        let rate = i.turn_rate.copysign(turn);
        let turn_time = turn / rate;
        let turn_disp = arc(v, rate, i.entry_heading, turn_time);

        // entry-leg length that puts the turn exit on the ship's track line
        let normal = Vector3::new(-track.sin(), track.cos(), 0.0);
        let lateral = normal.dot(&(i.start + turn_disp - ship.position));
        let leg = -lateral / normal.dot(&dir(i.entry_heading));
        let leg_time = leg / v;
        if !(leg_time >= i.descent_time) {
            return Err(Error::Config(format!(
                "entry leg of {leg:.1} m is shorter than the initial descent; change the entry heading"
            )));
        }
        let hold_z = i.start[2] + i.descent_rate * i.descent_time;
        let t_turn = leg_time;
        let turn_start = i.start + dir(i.entry_heading) * leg + Vector3::new(0.0, 0.0, hold_z - i.start[2]);
        let t_decel = t_turn + turn_time;
        let decel_start = turn_start + turn_disp;

        // linear ramp from v to vs closes (v - vs)/2 * T on the ship
        let gap = dir(track).dot(&(ship.at(t_decel) - decel_start));
        if !(gap > 0.0) {
            return Err(Error::Config("helicopter rolls out ahead of the ship".into()));
        }
        let decel_time = 2.0 * gap / (v - vs);
        let t_land = t_decel + decel_time;
        let land_start = ship.at(t_land) + Vector3::new(0.0, 0.0, hold_z - ship.position[2]);
        let target_z = ship.position[2] - i.gear_offset;
        let land_time = (target_z - hold_z) / i.landing_descent_rate;
        if !(land_time > 0.0) {
            return Err(Error::Config("approach altitude is below the deck".into()));
        }

        let descent_end = i.start + dir(i.entry_heading) * (v * i.descent_time)
            + Vector3::new(0.0, 0.0, hold_z - i.start[2]);
        let seg = |kind, start, duration, position, heading, speed| Segment {
            kind,
            start,
            duration,
            position,
            heading,
            speed,
        };
        let segments = [
            seg(PhaseKind::InitialDescent, 0.0, i.descent_time, i.start, i.entry_heading, v),
            seg(
                PhaseKind::ForwardFlight,
                i.descent_time,
                leg_time - i.descent_time,
                descent_end,
                i.entry_heading,
                v,
            ),
            seg(PhaseKind::CoordinatedTurn, t_turn, turn_time, turn_start, i.entry_heading, v),
            seg(PhaseKind::Deceleration, t_decel, decel_time, decel_start, track, v),
            seg(PhaseKind::FinalLanding, t_land, land_time, land_start, track, vs),
        ];
        Ok(Self {
            inputs,
            ship,
            segments,
            turn_rate: rate,
        })
    }

    pub fn segment(&self, kind: PhaseKind) -> &Segment {
        &self.segments[kind.index()]
    }

    /// Planned time for the gear to reach the deck.
    pub fn planned_duration(&self) -> f64 {
        self.segments[4].end()
    }

    /// Final heading, along the ship's track.
    pub fn track(&self) -> f64 {
        self.segments[4].heading
    }

    /// Reference of phase `kind` at mission time `t`. Times outside the
    /// segment extrapolate its kinematics.
    pub fn reference(&self, kind: PhaseKind, t: f64) -> Reference {
        let s = self.segment(kind);
        let tau = t - s.start;
        let i = &self.inputs;
        match kind {
            PhaseKind::InitialDescent | PhaseKind::ForwardFlight => {
                let sink = if kind == PhaseKind::InitialDescent { i.descent_rate } else { 0.0 };
                let vel = dir(s.heading) * s.speed + Vector3::new(0.0, 0.0, sink);
                Reference {
                    position: s.position + vel * tau,
                    velocity: vel,
                    heading: s.heading,
                    heading_rate: 0.0,
                }
            }
            PhaseKind::CoordinatedTurn => {
                let tau = tau.min(s.duration);
                let psi = s.heading + self.turn_rate * tau;
                let turning = t < s.end();
                Reference {
                    position: s.position + arc(s.speed, self.turn_rate, s.heading, tau)
                        + dir(psi) * (s.speed * (t - s.end()).max(0.0)),
                    velocity: dir(psi) * s.speed,
                    heading: psi,
                    heading_rate: if turning { self.turn_rate } else { 0.0 },
                }
            }
            PhaseKind::Deceleration => {
                let vs = self.ship.speed();
                let tau = tau.min(s.duration);
                let accel = (s.speed - vs) / s.duration;
                let dist = s.speed * tau - 0.5 * accel * tau * tau;
                let speed = s.speed - accel * tau;
                let past = (t - s.end()).max(0.0);
                Reference {
                    position: s.position + dir(s.heading) * (dist + speed * past),
                    velocity: dir(s.heading) * speed,
                    heading: s.heading,
                    heading_rate: 0.0,
                }
            }
            PhaseKind::FinalLanding => {
                let pad = self.ship.at(t);
                let rate = i.landing_descent_rate;
                Reference {
                    position: Vector3::new(pad[0], pad[1], s.position[2] + rate * tau),
                    velocity: self.ship.velocity + Vector3::new(0.0, 0.0, rate),
                    heading: s.heading,
                    heading_rate: 0.0,
                }
            }
        }
    }
}
