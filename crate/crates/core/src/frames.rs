//! Reference frames, attitude kinematics, unit conversions and the standard
//! atmosphere.
//!
//! Internal physics uses imperial units (ft, slug, lbf, rad). Attitude follows
//! the yaw-pitch-roll (3-2-1) sequence; the earth frame is north-east-down and
//! the body frame is forward-right-down.
//!
//! Rotor azimuth is measured from the downstream (aft-pointing) blade position
//! and increases in the direction of rotation. The main rotor turns
//! counter-clockwise seen from above, so the blade at azimuth 90 deg points to
//! starboard and is advancing.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Standard gravity, ft/s^2.
pub const GRAVITY: f64 = 32.174;
/// Feet to metres.
pub const FT_TO_M: f64 = 0.3048;
/// Knots to ft/s.
pub const KTS_TO_FTPS: f64 = 1852.0 / 0.3048 / 3600.0;
/// Horsepower in ft*lbf/s.
pub const HP: f64 = 550.0;

const GIMBAL_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Self {
        Self { phi, theta, psi }
    }

    fn check_finite(&self) -> Result<()> {
        if self.phi.is_finite() && self.theta.is_finite() && self.psi.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("non-finite euler angles {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Earth,
    Body,
    Hub,
    RotatingBlade,
    LaggedBlade,
}

/// Direction-cosine matrix mapping vector components from `from` into `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTransform {
    matrix: Matrix3<f64>,
    from: Frame,
    to: Frame,
}

impl FrameTransform {
    /// Wraps a matrix after checking it is a proper rotation.
    pub fn new(matrix: Matrix3<f64>, from: Frame, to: Frame) -> Result<Self> {
        let t = Self { matrix, from, to };
        if !t.orthonormality_error().is_finite() || t.orthonormality_error() > 1e-9 {
            return Err(Error::InvalidArgument("matrix is not orthonormal".into()));
        }
        if (matrix.determinant() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("matrix is not a proper rotation".into()));
        }
        Ok(t)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn from_frame(&self) -> Frame {
        self.from
    }

    pub fn to_frame(&self) -> Frame {
        self.to
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.matrix * v
    }

    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            from: self.to,
            to: self.from,
        }
    }

    /// `next` after `self`. The frames must chain.
    pub fn then(&self, next: &FrameTransform) -> Result<Self> {
        if next.from != self.to {
            return Err(Error::InvalidArgument(format!(
                "cannot chain {:?}->{:?} with {:?}->{:?}",
                self.from, self.to, next.from, next.to
            )));
        }
        Ok(Self {
            matrix: next.matrix * self.matrix,
            from: self.from,
            to: next.to,
        })
    }

    /// Largest entry of |M M^T - I|.
    pub fn orthonormality_error(&self) -> f64 {
        (self.matrix * self.matrix.transpose() - Matrix3::identity()).amax()
    }
}

fn dcm(angles: &EulerAngles) -> Matrix3<f64> {
    let (sf, cf) = angles.phi.sin_cos();
    let (st, ct) = angles.theta.sin_cos();
    let (sp, cp) = angles.psi.sin_cos();
    Matrix3::new(
        ct * cp,
        ct * sp,
        -st,
        sf * st * cp - cf * sp,
        sf * st * sp + cf * cp,
        sf * ct,
        cf * st * cp + sf * sp,
        cf * st * sp - sf * cp,
        cf * ct,
    )
}

/// Earth-to-body transform for a 3-2-1 Euler sequence.
pub fn euler_to_dcm(angles: EulerAngles) -> Result<FrameTransform> {
    angles.check_finite()?;
    Ok(FrameTransform {
        matrix: dcm(&angles),
        from: Frame::Earth,
        to: Frame::Body,
    })
}

/// Recovers 3-2-1 Euler angles from an earth-to-body transform.
pub fn dcm_to_euler(t: &FrameTransform) -> Result<EulerAngles> {
    if t.from != Frame::Earth || t.to != Frame::Body {
        return Err(Error::InvalidArgument("expected an earth-to-body transform".into()));
    }
    let m = &t.matrix;
    let theta = (-m[(0, 2)]).clamp(-1.0, 1.0).asin();
    let phi = m[(1, 2)].atan2(m[(2, 2)]);
    let psi = m[(0, 1)].atan2(m[(0, 0)]);
    Ok(EulerAngles { phi, theta, psi })
}

/// Euler angle rates from body angular rates.
pub fn body_rates_to_euler_rates(
    p: f64,
    q: f64,
    r: f64,
    angles: EulerAngles,
) -> Result<(f64, f64, f64)> {
    angles.check_finite()?;
    if angles.theta.abs() >= std::f64::consts::FRAC_PI_2 - GIMBAL_MARGIN {
        return Err(Error::GimbalLock { theta: angles.theta });
    }
    let (sf, cf) = angles.phi.sin_cos();
    let (st, ct) = angles.theta.sin_cos();
    let qr = q * sf + r * cf;
    Ok((p + qr * st / ct, q * cf - r * sf, qr / ct))
}

/// Body-axis velocity of a steady flight path with heading along earth x.
pub fn body_velocity_on_path(speed: f64, gamma: f64, angles: EulerAngles) -> Vector3<f64> {
    let earth = Vector3::new(speed * gamma.cos(), 0.0, -speed * gamma.sin());
    dcm(&angles) * earth
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atmosphere {
    pub altitude: f64,
    pub density: f64,
    pub speed_of_sound: f64,
}

const RHO_SL: f64 = 0.002_376_9;
const T_SL: f64 = 518.67; // deg R
const LAPSE: f64 = 0.003_566_16; // deg R / ft
const H_TROPOPAUSE: f64 = 36_089.24;
const R_AIR: f64 = 1716.59; // ft*lbf/(slug*R)
const GAMMA_AIR: f64 = 1.4;
const MAX_ALTITUDE: f64 = 40_000.0;

impl Atmosphere {
    /// ISA properties at a pressure altitude in feet.
    pub fn at(altitude: f64) -> Result<Self> {
        if !altitude.is_finite() || !(0.0..=MAX_ALTITUDE).contains(&altitude) {
            return Err(Error::InvalidArgument(format!(
                "altitude {altitude} ft outside [0, {MAX_ALTITUDE}]"
            )));
        }
        let exponent = GRAVITY / (LAPSE * R_AIR) - 1.0;
        let (temp, density) = if altitude <= H_TROPOPAUSE {
            let t = T_SL - LAPSE * altitude;
            (t, RHO_SL * (t / T_SL).powf(exponent))
        } else {
            let t = T_SL - LAPSE * H_TROPOPAUSE;
            let rho_tp = RHO_SL * (t / T_SL).powf(exponent);
            (t, rho_tp * (-(altitude - H_TROPOPAUSE) * GRAVITY / (R_AIR * t)).exp())
        };
        Ok(Self {
            altitude,
            density,
            speed_of_sound: (GAMMA_AIR * R_AIR * temp).sqrt(),
        })
    }

    /// Same temperature, arbitrary density. Used for component studies.
    pub fn with_density(self, density: f64) -> Self {
        Self { density, ..self }
    }
}

/// ISA density in slug/ft^3.
pub fn density_at(altitude: f64) -> Result<f64> {
    Atmosphere::at(altitude).map(|a| a.density)
}
