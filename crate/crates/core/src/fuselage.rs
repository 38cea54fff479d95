//! Rigid-body equations of motion and fuselage drag.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::frames::GRAVITY;
use crate::loads::{LoadSource, Loads};

/// Body-axis velocities (ft/s), rates (rad/s) and Euler angles (rad).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FuselageState {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl FuselageState {
    pub fn from_slice(s: &[f64]) -> Self {
        Self {
            u: s[0],
            v: s[1],
            w: s[2],
            p: s[3],
            q: s[4],
            r: s[5],
            phi: s[6],
            theta: s[7],
            psi: s[8],
        }
    }

    pub fn to_array(&self) -> [f64; 9] {
        [
            self.u, self.v, self.w, self.p, self.q, self.r, self.phi, self.theta, self.psi,
        ]
    }

    pub fn velocity(&self) -> Vector3<f64> {
        Vector3::new(self.u, self.v, self.w)
    }

    pub fn rates(&self) -> Vector3<f64> {
        Vector3::new(self.p, self.q, self.r)
    }
}

/// Mass (slug) and inertia tensor components (slug*ft^2). Products of
/// inertia use the positive-integral convention, e.g. `ixz` = sum of m*x*z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    pub mass: f64,
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    pub ixy: f64,
    pub ixz: f64,
    pub iyz: f64,
}

impl MassProperties {
    pub fn new(mass: f64, ixx: f64, iyy: f64, izz: f64, ixy: f64, ixz: f64, iyz: f64) -> Result<Self> {
        let mp = Self {
            mass,
            ixx,
            iyy,
            izz,
            ixy,
            ixz,
            iyz,
        };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::Config(format!("mass must be positive, got {}", self.mass)));
        }
        if self.tensor().cholesky().is_none() {
            return Err(Error::Config("inertia tensor is not positive definite".into()));
        }
        Ok(())
    }

    pub fn from_weight(weight_lbf: f64, ixx: f64, iyy: f64, izz: f64, ixz: f64) -> Result<Self> {
        Self::new(weight_lbf / GRAVITY, ixx, iyy, izz, 0.0, ixz, 0.0)
    }

    pub fn tensor(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.ixx, -self.ixy, -self.ixz, -self.ixy, self.iyy, -self.iyz, -self.ixz, -self.iyz,
            self.izz,
        )
    }
}

/// Translational equilibrium residual. `total` excludes weight.
pub fn force_residual(
    s: &FuselageState,
    d: &FuselageState,
    total: &Loads,
    mp: &MassProperties,
) -> [f64; 3] {
    let m = mp.mass;
    let (st, ct) = s.theta.sin_cos();
    let (sf, cf) = s.phi.sin_cos();
    [
        total.x() - m * (d.u + s.q * s.w - s.r * s.v + GRAVITY * st),
        total.y() - m * (d.v + s.r * s.u - s.p * s.w - GRAVITY * sf * ct),
        total.z() - m * (d.w + s.p * s.v - s.q * s.u - GRAVITY * cf * ct),
    ]
}

/// Rotational equilibrium residual about the CG, with every product of
/// inertia retained.
pub fn moment_residual(
    s: &FuselageState,
    d: &FuselageState,
    total: &Loads,
    mp: &MassProperties,
) -> [f64; 3] {
    let MassProperties {
        ixx,
        iyy,
        izz,
        ixy,
        ixz,
        iyz,
        ..
    } = *mp;
    let (p, q, r) = (s.p, s.q, s.r);
    let (pd, qd, rd) = (d.p, d.q, d.r);
    let l = ixx * pd - ixy * (qd - p * r) - ixz * (rd + p * q) - iyz * (q * q - r * r)
        - (iyy - izz) * q * r;
    let m = iyy * qd - iyz * (rd - p * q) - ixy * (pd + q * r) - ixz * (r * r - p * p)
        - (izz - ixx) * r * p;
    let n = izz * rd - ixz * (pd - q * r) - iyz * (qd + p * r) - ixy * (p * p - q * q)
        - (ixx - iyy) * p * q;
    [total.l() - l, total.m() - m, total.n() - n]
}

/// Equivalent flat-plate drag area (ft^2) at fuselage angle of attack in
/// degrees.
pub fn flat_plate_area(alpha_deg: f64) -> f64 {
    let a = 1.66 * alpha_deg;
    35.14 + 0.016 * a * a
}

/// Fuselage drag, acting at the CG against the x-z velocity.
pub fn fuselage_aero_loads(s: &FuselageState, rho: f64, alpha_deg: f64) -> Loads {
    let speed = s.u.hypot(s.w);
    if speed == 0.0 {
        return Loads::zero(LoadSource::Fuselage);
    }
    let drag = 0.5 * rho * s.u * s.u * flat_plate_area(alpha_deg);
    let force = Vector3::new(-drag * s.u / speed, 0.0, -drag * s.w / speed);
    Loads::new(force, Vector3::zeros(), LoadSource::Fuselage)
}

/// Angle of attack used by the drag fit, in degrees. Rearward flight is
/// folded onto the forward branch so the fit stays in its range.
pub fn fuselage_alpha_deg(s: &FuselageState) -> f64 {
    if s.u == 0.0 && s.w == 0.0 {
        0.0
    } else {
        s.w.atan2(s.u.abs()).to_degrees()
    }
}
