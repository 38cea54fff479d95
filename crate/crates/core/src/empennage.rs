//! Horizontal and vertical tail surfaces.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::loads::{LoadSource, Loads};
use crate::tables::AirfoilTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    /// Lifts in the x-z plane; incidence scheduled with airspeed.
    Horizontal,
    /// Lifts in the x-y plane; fixed incidence.
    Vertical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailSurface {
    pub kind: SurfaceKind,
    /// Reference point relative to the CG, body axes (ft).
    pub position: Vector3<f64>,
    pub area: f64,
    /// Fixed incidence (rad). The horizontal tail uses the stabilator
    /// schedule instead.
    pub incidence: f64,
    /// Dynamic-pressure loss factor applied to the free-stream velocity.
    pub dynamic_pressure_factor: f64,
}

impl TailSurface {
    pub fn validate(&self) -> Result<()> {
        if !(self.area > 0.0) {
            return Err(Error::Config("tail surface area must be positive".into()));
        }
        if !(self.dynamic_pressure_factor > 0.0 && self.dynamic_pressure_factor <= 1.0) {
            return Err(Error::Config("tail dynamic pressure factor must lie in (0, 1]".into()));
        }
        Ok(())
    }

    fn source(&self) -> LoadSource {
        match self.kind {
            SurfaceKind::Horizontal => LoadSource::HorizontalTail,
            SurfaceKind::Vertical => LoadSource::VerticalTail,
        }
    }
}

/// Velocity of the surface relative to the local air, body axes. `wake` is
/// the main-rotor wake velocity at the surface (positive z down).
pub fn surface_velocity(
    velocity: &Vector3<f64>,
    rates: &Vector3<f64>,
    surface: &TailSurface,
    wake: &Vector3<f64>,
) -> Vector3<f64> {
    velocity * surface.dynamic_pressure_factor + rates.cross(&surface.position) - wake
}

/// Lift and drag from the local velocity, resolved in body axes, with
/// moments about the CG. Only the velocity in the surface's plane of
/// symmetry loads it; flow along the span is ignored.
pub fn surface_loads(
    local: &Vector3<f64>,
    surface: &TailSurface,
    incidence: f64,
    rho: f64,
    table: &AirfoilTable,
) -> Loads {
    let (in_plane, lift_dir) = match surface.kind {
        SurfaceKind::Horizontal => (
            Vector3::new(local.x, 0.0, local.z),
            Vector3::new(local.z, 0.0, -local.x),
        ),
        SurfaceKind::Vertical => (
            Vector3::new(local.x, local.y, 0.0),
            Vector3::new(local.y, -local.x, 0.0),
        ),
    };
    let speed = in_plane.norm();
    if speed == 0.0 {
        return Loads::zero(surface.source());
    }
    let angle = match surface.kind {
        SurfaceKind::Horizontal => local.z.atan2(local.x),
        SurfaceKind::Vertical => local.y.atan2(local.x),
    } + incidence;
    let c = table.lookup(angle, 0.0);
    // lift_dir and in_plane both have length `speed`
    let k = 0.5 * rho * surface.area * speed;
    let force = lift_dir * (k * c.cl) - in_plane * (k * c.cd);
    Loads::from_force_at(force, &surface.position, surface.source())
}
