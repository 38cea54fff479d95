use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub const DEFAULT_RADIAL_ELEMENTS: usize = 100;
pub const DEFAULT_AZIMUTH_STEPS: usize = 360;

/// Main-rotor geometry and blade properties in runtime units (ft, rad,
/// slug/ft).
#[derive(Debug, Clone, PartialEq)]
pub struct RotorGeometry {
    pub radius: f64,
    pub chord: f64,
    pub hinge_offset: f64,
    pub blade_count: usize,
    pub omega: f64,
    pub twist: f64,
    pub blade_mass_per_length: f64,
    /// Longitudinal mast tilt, negative when the shaft leans forward.
    pub mast_tilt: f64,
    pub control_phase: f64,
    pub root_cutout: f64,
    /// Hub centre relative to the CG, body axes (ft).
    pub hub_position: Vector3<f64>,
    pub flap_spring: f64,
    pub flap_damper: f64,
    pub lag_spring: f64,
    pub lag_damper: f64,
    pub radial_elements: usize,
    pub azimuth_steps: usize,
}

impl RotorGeometry {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("main rotor: {m}")));
        if !(self.radius > 0.0) {
            return bad("radius must be positive");
        }
        if !(self.chord > 0.0) {
            return bad("chord must be positive");
        }
        if !(self.hinge_offset >= 0.0 && self.hinge_offset < self.radius) {
            return bad("hinge offset must lie in [0, R)");
        }
        if self.blade_count < 2 {
            return bad("at least two blades required");
        }
        if !(self.omega > 0.0) {
            return bad("rotor speed must be positive");
        }
        if !(self.blade_mass_per_length > 0.0) {
            return bad("blade mass per length must be positive");
        }
        if !(self.root_cutout >= self.hinge_offset && self.root_cutout < self.radius) {
            return bad("first airfoil section must lie between hinge and tip");
        }
        if self.radial_elements == 0 || self.azimuth_steps < 4 {
            return bad("discretisation too coarse");
        }
        let springs = [self.flap_spring, self.flap_damper, self.lag_spring, self.lag_damper];
        if springs.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return bad("hinge springs and dampers must be non-negative");
        }
        Ok(())
    }

    pub fn tip_speed(&self) -> f64 {
        self.omega * self.radius
    }

    pub fn disk_area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    pub fn solidity(&self) -> f64 {
        self.blade_count as f64 * self.chord / (std::f64::consts::PI * self.radius)
    }

    fn span(&self) -> f64 {
        self.radius - self.hinge_offset
    }

    /// Blade mass outboard of the hinge.
    pub fn blade_mass(&self) -> f64 {
        self.blade_mass_per_length * self.span()
    }

    /// First mass moment about the hinge.
    pub fn blade_first_moment(&self) -> f64 {
        0.5 * self.blade_mass_per_length * self.span().powi(2)
    }

    /// Second mass moment about the hinge.
    pub fn blade_inertia(&self) -> f64 {
        self.blade_mass_per_length * self.span().powi(3) / 3.0
    }

    /// Lock number for a given lift-curve slope and density.
    pub fn lock_number(&self, lift_slope: f64, rho: f64) -> f64 {
        rho * lift_slope * self.chord * self.radius.powi(4) / self.blade_inertia()
    }

    /// Body-to-hub rotation. Hub x points forward in the rotor plane, z down
    /// along the shaft.
    pub fn hub_matrix(&self) -> Matrix3<f64> {
        let (s, c) = (-self.mast_tilt).sin_cos();
        Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
    }

    /// Upward shaft axis in body coordinates.
    pub fn shaft_up(&self) -> Vector3<f64> {
        -self.hub_matrix().row(2).transpose()
    }

    /// Radial element midpoints (ft from the rotor centre) and their width.
    pub fn stations(&self) -> (Vec<f64>, f64) {
        let n = self.radial_elements;
        let dr = (self.radius - self.root_cutout) / n as f64;
        (
            (0..n).map(|i| self.root_cutout + (i as f64 + 0.5) * dr).collect(),
            dr,
        )
    }

    /// Built-in twist at radius `r`, zero at the hinge and `twist` at the tip.
    pub fn twist_at(&self, r: f64) -> f64 {
        self.twist * (r - self.hinge_offset) / self.span()
    }
}

/// Swashplate angles (rad).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SwashplateAngles {
    pub theta0: f64,
    pub theta1c: f64,
    pub theta1s: f64,
}

/// Blade pitch at radius `r` and azimuth `psi`.
pub fn blade_pitch(psi: f64, controls: &SwashplateAngles, geom: &RotorGeometry, r: f64) -> Result<f64> {
    if !(r >= geom.hinge_offset && r <= geom.radius) {
        return Err(Error::InvalidArgument(format!(
            "radius {r} ft outside blade [{}, {}]",
            geom.hinge_offset, geom.radius
        )));
    }
    let (s, c) = (psi + geom.control_phase).sin_cos();
    Ok(controls.theta0 + controls.theta1c * c + controls.theta1s * s + geom.twist_at(r))
}

/// Inflow harmonics (nondimensional on tip speed).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InflowState {
    pub lambda0: f64,
    pub lambda1c: f64,
    pub lambda1s: f64,
}

impl InflowState {
    pub fn to_array(&self) -> [f64; 3] {
        [self.lambda0, self.lambda1c, self.lambda1s]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self {
            lambda0: a[0],
            lambda1c: a[1],
            lambda1s: a[2],
        }
    }
}

/// Linear inflow at radius `r`, azimuth `psi`.
pub fn local_inflow(lambda: &InflowState, r: f64, psi: f64, radius: f64) -> f64 {
    let x = r / radius;
    let (s, c) = psi.sin_cos();
    lambda.lambda0 + x * (lambda.lambda1c * c + lambda.lambda1s * s)
}

/// First-harmonic flap and lag coordinates with their rates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotorState {
    pub flap: [f64; 3],
    pub flap_rate: [f64; 3],
    pub lag: [f64; 3],
    pub lag_rate: [f64; 3],
}
