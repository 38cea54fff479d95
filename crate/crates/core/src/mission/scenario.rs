//! Scenario file: initial state, ship, guidance and per-phase settings.

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::KTS_TO_FTPS;
use crate::frames::FT_TO_M;
use crate::vehicle::config::apply_override;

use super::plan::{ApproachInputs, ShipState};

const KTS_TO_MPS: f64 = KTS_TO_FTPS * FT_TO_M;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AircraftSection {
    pub gross_weight_lbf: f64,
    /// Density altitude used for the whole mission (ft).
    pub altitude_ft: f64,
}

impl Default for AircraftSection {
    fn default() -> Self {
        Self {
            gross_weight_lbf: 16_000.0,
            altitude_ft: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingSection {
    pub control_rate_hz: f64,
    pub physics_dt_s: f64,
    /// Largest stick rate the autopilot may command (%/s).
    pub slew_limit_pct_per_s: f64,
}

impl Default for TimingSection {
    fn default() -> Self {
        Self {
            control_rate_hz: 50.0,
            physics_dt_s: 0.02,
            slew_limit_pct_per_s: 10.0,
        }
    }
}

impl TimingSection {
    /// Physics substeps per control step.
    pub fn substeps(&self) -> Result<usize> {
        if !(self.control_rate_hz > 0.0 && self.physics_dt_s > 0.0 && self.slew_limit_pct_per_s > 0.0) {
            return Err(Error::Config("timing values must be positive".into()));
        }
        let n = 1.0 / (self.control_rate_hz * self.physics_dt_s);
        if (n - n.round()).abs() > 1e-9 || n.round() < 1.0 {
            return Err(Error::Config(format!(
                "control period is not a whole number of physics steps ({n})"
            )));
        }
        Ok(n.round() as usize)
    }

    pub fn control_period(&self) -> f64 {
        1.0 / self.control_rate_hz
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HelicopterSection {
    pub position_m: [f64; 3],
    pub speed_kts: f64,
    /// Entry-leg heading (deg). Must differ from the ship's track.
    pub heading_deg: f64,
    /// CG height above the landing gear (m).
    pub gear_offset_m: f64,
}

impl Default for HelicopterSection {
    fn default() -> Self {
        Self {
            position_m: [0.0, 0.0, -60.96],
            speed_kts: 30.0,
            heading_deg: -12.0,
            gear_offset_m: 0.4826,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShipSection {
    /// Pad centre (m, NED).
    pub position_m: [f64; 3],
    pub speed_kts: f64,
    pub heading_deg: f64,
    pub landing_radius_m: f64,
}

impl Default for ShipSection {
    fn default() -> Self {
        Self {
            position_m: [679.7285, -88.0, -5.0],
            speed_kts: 10.0,
            heading_deg: 0.0,
            landing_radius_m: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuidanceSection {
    /// Horizontal position error to velocity command (1/s).
    pub position_gain: f64,
    /// Integral of horizontal position error (1/s^2).
    pub integral_gain: f64,
    /// Height error to sink-rate command (1/s).
    pub height_gain: f64,
    pub height_integral_gain: f64,
    /// Heading error to heading-rate command (1/s).
    pub heading_gain: f64,
    /// Cap on the velocity correction added to the reference (m/s).
    pub max_correction_mps: f64,
}

impl Default for GuidanceSection {
    fn default() -> Self {
        Self {
            position_gain: 0.3,
            integral_gain: 0.04,
            height_gain: 0.4,
            height_integral_gain: 0.03,
            heading_gain: 0.8,
            max_correction_mps: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandingSection {
    pub descent_rate_mps: f64,
    /// Touchdown counts only below this sink rate (m/s).
    pub max_touchdown_rate_mps: f64,
    /// Extra time allowed after the planned touchdown (s).
    pub timeout_margin_s: f64,
}

impl Default for LandingSection {
    fn default() -> Self {
        Self {
            descent_rate_mps: 0.5,
            max_touchdown_rate_mps: 1.0,
            timeout_margin_s: 30.0,
        }
    }
}

/// LQR weights. `velocity` and `heading_rate` weight the tracked outputs;
/// `rate`, `attitude` and `rotor` are diagonal state weights; `control`
/// weights every stick channel (per percent squared).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Weights {
    pub velocity: f64,
    pub heading_rate: f64,
    pub rate: f64,
    pub attitude: f64,
    pub rotor: f64,
    pub control: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            velocity: 10.0,
            heading_rate: 1.0e5,
            rate: 1.0,
            attitude: 10.0,
            rotor: 0.01,
            control: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DescentPhase {
    pub duration_s: f64,
    pub descent_rate_mps: f64,
    pub weights: Weights,
}

impl Default for DescentPhase {
    fn default() -> Self {
        Self {
            duration_s: 15.0,
            descent_rate_mps: 1.4,
            weights: Weights::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TurnPhase {
    pub turn_rate_deg_s: f64,
    pub weights: Weights,
}

impl Default for TurnPhase {
    fn default() -> Self {
        Self {
            turn_rate_deg_s: 3.0,
            weights: Weights::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlainPhase {
    pub weights: Weights,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhasesSection {
    pub initial_descent: DescentPhase,
    pub forward_flight: PlainPhase,
    pub coordinated_turn: TurnPhase,
    pub deceleration: PlainPhase,
    pub final_landing: PlainPhase,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub aircraft: AircraftSection,
    pub timing: TimingSection,
    pub helicopter: HelicopterSection,
    pub ship: ShipSection,
    pub guidance: GuidanceSection,
    pub landing: LandingSection,
    pub phases: PhasesSection,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Value = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        value
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))
    }

    /// Reads a scenario (defaults when `path` is `None`) and applies
    /// dotted `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                    path: p.to_path_buf(),
                    source,
                })?;
                text.parse::<toml::Value>()
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Value::try_from(Scenario::default()).map_err(|e| Error::Config(e.to_string()))?,
        };
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        value
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serialises")
    }

    pub fn ship_state(&self) -> Result<ShipState> {
        let s = &self.ship;
        let psi = s.heading_deg.to_radians();
        let v = s.speed_kts * KTS_TO_MPS;
        ShipState::new(
            Vector3::from(s.position_m),
            Vector3::new(v * psi.cos(), v * psi.sin(), 0.0),
            s.landing_radius_m,
        )
    }

    pub fn approach_inputs(&self) -> ApproachInputs {
        let h = &self.helicopter;
        let d = &self.phases.initial_descent;
        ApproachInputs {
            start: Vector3::from(h.position_m),
            speed: h.speed_kts * KTS_TO_MPS,
            entry_heading: h.heading_deg.to_radians(),
            descent_rate: d.descent_rate_mps,
            descent_time: d.duration_s,
            turn_rate: self.phases.coordinated_turn.turn_rate_deg_s.to_radians(),
            landing_descent_rate: self.landing.descent_rate_mps,
            gear_offset: h.gear_offset_m,
        }
    }

    pub fn weights(&self) -> [Weights; 5] {
        let p = &self.phases;
        [
            p.initial_descent.weights,
            p.forward_flight.weights,
            p.coordinated_turn.weights,
            p.deceleration.weights,
            p.final_landing.weights,
        ]
    }
}
