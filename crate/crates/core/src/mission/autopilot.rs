//! Per-phase LQR controllers.
//!
//! Heading is dropped from the regulator state: nothing in the dynamics
//! depends on it, so its column of A is zero and it would only add an
//! uncontrollable-looking integrator. Heading is handled by the guidance
//! loop through the heading-rate output instead.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use crate::frames::{euler_to_dcm, EulerAngles};
use crate::linmod::{linearize, LinearModel, StepRule};
use crate::lqr::{control_law, design_lqr, ControlCommand, GainSet, SetPoint};
use crate::trim::{solve_trim, FlightCondition, TrimOptions, TrimResult};
use crate::vehicle::state::*;
use crate::vehicle::{ControlVector, SystemState, Vehicle};

use super::plan::PhaseKind;
use super::scenario::Weights;

/// Regulator state count (heading removed).
pub const N_REGULATED: usize = N_STATES - 1;

/// The four tracked outputs, in order. Velocities are in the heading frame
/// (forward, right, down), ft/s.
pub const TRACKED_OUTPUTS: [&str; 4] = ["forward_speed", "lateral_speed", "sink_rate", "heading_rate"];

fn full_index(k: usize) -> usize {
    if k < PSI {
        k
    } else {
        k + 1
    }
}

/// State vector without heading.
pub fn regulated(y: &SystemState) -> DVector<f64> {
    DVector::from_iterator(N_REGULATED, (0..N_REGULATED).map(|k| y[full_index(k)]))
}

fn kept() -> Vec<usize> {
    (0..N_REGULATED).map(full_index).collect()
}

/// Tracked outputs of a state: heading-frame velocity and heading rate.
pub fn tracked_outputs(y: &SystemState) -> Result<[f64; 4]> {
    let level = euler_to_dcm(EulerAngles::new(y[PHI], y[THETA], 0.0))?;
    let v = level.inverse().apply(&Vector3::new(y[U], y[V], y[W]));
    let (_, _, psi_dot) = crate::frames::body_rates_to_euler_rates(
        y[P],
        y[Q],
        y[R],
        EulerAngles::new(y[PHI], y[THETA], 0.0),
    )?;
    Ok([v[0], v[1], v[2], psi_dot])
}

fn output_jacobian(y0: &SystemState) -> Result<DMatrix<f64>> {
    let mut cs = DMatrix::zeros(4, N_REGULATED);
    for k in 0..N_REGULATED {
        let j = full_index(k);
        let h = 1e-6 * y0[j].abs().max(1.0);
        let mut yp = *y0;
        yp[j] += h;
        let mut ym = *y0;
        ym[j] -= h;
        let (op, om) = (tracked_outputs(&yp)?, tracked_outputs(&ym)?);
        for i in 0..4 {
            cs[(i, k)] = (op[i] - om[i]) / (2.0 * h);
        }
    }
    Ok(cs)
}

/// Q over the regulated states (output weights mapped through `cs` plus a
/// diagonal) and R over the sticks.
pub fn weight_matrices(w: &Weights, cs: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let diag = DVector::from_iterator(
        N_REGULATED,
        (0..N_REGULATED).map(|k| match full_index(k) {
            U | V | W => 0.0,
            P | Q | R => w.rate,
            PHI | THETA => w.attitude,
            _ => w.rotor,
        }),
    );
    let wy = DMatrix::from_diagonal(&DVector::from_row_slice(&[w.velocity, w.velocity, w.velocity, w.heading_rate]));
    let q = DMatrix::from_diagonal(&diag) + cs.transpose() * wy * cs;
    let q = (&q + q.transpose()) * 0.5;
    (q, DMatrix::identity(N_CONTROLS, N_CONTROLS) * w.control)
}

/// Controller for one mission phase.
#[derive(Debug, Clone)]
pub struct PhaseController {
    pub kind: PhaseKind,
    pub trim: TrimResult,
    /// Full-order model at the trim.
    pub model: LinearModel,
    /// Regulator matrices (heading removed).
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub gains: GainSet,
    pub set_point: SetPoint,
    /// Tracked outputs at the trim point.
    pub trim_outputs: [f64; 4],
}

impl PhaseController {
    pub fn design(
        kind: PhaseKind,
        condition: &FlightCondition,
        vehicle: &Vehicle,
        weights: &Weights,
        seed: Option<&TrimResult>,
    ) -> Result<Self> {
        let seed = seed.map(|t| t.unknowns());
        let trim = solve_trim(condition, vehicle, seed.as_ref(), &TrimOptions::default())?;
        let model = linearize(&trim, vehicle, &StepRule::default())?;
        let keep = kept();
        let a = model.a.select_rows(keep.iter()).select_columns(keep.iter());
        let b = model.b.select_rows(keep.iter());
        let cs = output_jacobian(&trim.state)?;
        let (q, r) = weight_matrices(weights, &cs);
        let gains = design_lqr(&a, &b, &q, &r)?;
        let set_point = SetPoint::new(&a, &b, cs, DMatrix::zeros(4, 4))?;
        let trim_outputs = tracked_outputs(&trim.state)?;
        Ok(Self {
            kind,
            trim,
            model,
            a,
            b,
            gains,
            set_point,
            trim_outputs,
        })
    }

    /// Stick command for tracked-output targets `outputs`.
    pub fn command(&self, y: &SystemState, outputs: &[f64; 4]) -> ControlCommand {
        let y_ss = DVector::from_iterator(4, (0..4).map(|i| outputs[i] - self.trim_outputs[i]));
        let (x_ss, u_ss) = self.set_point.targets(&y_ss);
        let x = regulated(&(y - self.trim.state));
        control_law(&self.gains.k, &x, &x_ss, &u_ss, &self.trim.controls)
    }

    pub fn closed_loop_eigenvalues(&self) -> Vec<nalgebra::Complex<f64>> {
        (&self.a - &self.b * &self.gains.k).complex_eigenvalues().iter().copied().collect()
    }
}

/// Moves `previous` toward `target` by at most `max_step` per channel.
pub fn slew(previous: &ControlVector, target: &ControlVector, max_step: f64) -> ControlVector {
    let p = previous.to_array();
    let t = target.to_array();
    ControlVector::from_array(std::array::from_fn(|i| p[i] + (t[i] - p[i]).clamp(-max_step, max_step)))
}

pub(crate) fn check_state(y: &SystemState) -> Result<()> {
    if y[THETA].abs() > 1.2 || y[PHI].abs() > 1.2 {
        return Err(Error::Numeric(format!(
            "attitude out of bounds (roll {:.1} deg, pitch {:.1} deg)",
            y[PHI].to_degrees(),
            y[THETA].to_degrees()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heading_is_removed() {
        let mut y = SystemState::zeros();
        for i in 0..N_STATES {
            y[i] = i as f64;
        }
        let x = regulated(&y);
        assert_eq!(x.len(), 24);
        assert_eq!(x[PSI], (PSI + 1) as f64);
        assert_eq!(x[PSI - 1], (PSI - 1) as f64);
    }

    #[test]
    fn outputs_in_level_flight() {
        let mut y = SystemState::zeros();
        y[U] = 100.0;
        y[W] = 5.0;
        y[R] = 0.1;
        y[PSI] = 1.0;
        let o = tracked_outputs(&y).unwrap();
        assert!((o[0] - 100.0).abs() < 1e-12 && o[1].abs() < 1e-12 && (o[2] - 5.0).abs() < 1e-12);
        assert!((o[3] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn slew_limits_each_channel() {
        let a = ControlVector::from_array([50.0, 50.0, 50.0, 50.0]);
        let b = ControlVector::from_array([51.0, 49.9, 50.0, 20.0]);
        let c = slew(&a, &b, 0.2).to_array();
        for (got, want) in c.iter().zip([50.2, 49.9, 50.0, 49.8]) {
            assert!((got - want).abs() < 1e-12, "{c:?}");
        }
    }
}
