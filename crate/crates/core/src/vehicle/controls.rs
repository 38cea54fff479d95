use crate::error::{Error, Result};
use crate::rotor::SwashplateAngles;

/// Pilot inputs in percent of travel; 50 is neutral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlVector {
    pub collective: f64,
    pub lateral: f64,
    pub longitudinal: f64,
    pub pedal: f64,
}

impl Default for ControlVector {
    fn default() -> Self {
        Self::neutral()
    }
}

impl ControlVector {
    pub const CHANNELS: [&'static str; 4] = ["collective", "lateral", "longitudinal", "pedal"];

    pub fn neutral() -> Self {
        Self::from_array([50.0; 4])
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            collective: a[0],
            lateral: a[1],
            longitudinal: a[2],
            pedal: a[3],
        }
    }

    pub fn from_slice(a: &[f64]) -> Self {
        Self::from_array([a[0], a[1], a[2], a[3]])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.collective, self.lateral, self.longitudinal, self.pedal]
    }

    /// First channel outside [0, 100], if any.
    pub fn out_of_range(&self) -> Option<(&'static str, f64)> {
        Self::CHANNELS
            .into_iter()
            .zip(self.to_array())
            .find(|(_, v)| !(0.0..=100.0).contains(v))
    }

    pub fn check_range(&self) -> Result<()> {
        match self.out_of_range() {
            Some((channel, value)) => Err(Error::Saturation { channel, value }),
            None => Ok(()),
        }
    }
}

/// Affine map from percent to angle for one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRange {
    /// Angle at 0 % (rad).
    pub min: f64,
    /// Angle at 100 % (rad).
    pub max: f64,
}

impl ChannelRange {
    pub fn new(name: &str, min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::Config(format!("rigging.{name}: need min < max")));
        }
        Ok(Self { min, max })
    }

    pub fn angle(&self, percent: f64) -> f64 {
        self.min + (self.max - self.min) * percent / 100.0
    }

    pub fn percent(&self, angle: f64) -> f64 {
        100.0 * (angle - self.min) / (self.max - self.min)
    }
}

/// Control linkage from cockpit inputs to blade pitch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rigging {
    pub collective: ChannelRange,
    pub lateral: ChannelRange,
    pub longitudinal: ChannelRange,
    pub pedal: ChannelRange,
}

impl Rigging {
    pub fn swashplate(&self, u: &ControlVector) -> SwashplateAngles {
        SwashplateAngles {
            theta0: self.collective.angle(u.collective),
            theta1c: self.lateral.angle(u.lateral),
            theta1s: self.longitudinal.angle(u.longitudinal),
        }
    }

    pub fn tail_collective(&self, u: &ControlVector) -> f64 {
        self.pedal.angle(u.pedal)
    }
}
