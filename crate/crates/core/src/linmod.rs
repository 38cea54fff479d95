//! Linear models about a trim point.
//!
//! For `f(y, y_dot, u) = 0` the first-order expansion is
//! `E dy_dot + F dy + G du = 0`, so `dy_dot = A dy + B du` with
//! `A = -E^-1 F` and `B = -E^-1 G`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::trim::{vehicle_for, TrimResult};
use crate::vehicle::state::{CONTROL_NAMES, N_CONTROLS, STATE_NAMES, STATE_UNITS};
use crate::vehicle::{ControlVector, SystemState, Vehicle};

/// Perturbation size for a variable at value `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRule {
    pub relative: f64,
    pub floor: f64,
}

impl Default for StepRule {
    fn default() -> Self {
        Self {
            relative: 1e-6,
            floor: 1e-7,
        }
    }
}

impl StepRule {
    pub fn step(&self, x: f64) -> f64 {
        (self.relative * x.abs()).max(self.floor)
    }
}

/// Partial derivatives of the residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobians {
    /// With respect to the state derivative.
    pub e: DMatrix<f64>,
    /// With respect to the state.
    pub f: DMatrix<f64>,
    /// With respect to the controls.
    pub g: DMatrix<f64>,
}

/// Central-difference Jacobians of a general residual. Probe columns are
/// numbered through y_dot, then y, then u.
pub fn jacobians_of<R>(
    residual: R,
    y: &DVector<f64>,
    y_dot: &DVector<f64>,
    u: &DVector<f64>,
    steps: &StepRule,
) -> Result<Jacobians>
where
    R: Fn(&DVector<f64>, &DVector<f64>, &DVector<f64>) -> Result<DVector<f64>>,
{
    let n = y.len();
    let m = u.len();
    let rows = residual(y, y_dot, u)?.len();
    let mut e = DMatrix::zeros(rows, n);
    let mut f = DMatrix::zeros(rows, n);
    let mut g = DMatrix::zeros(rows, m);

    let probe = |column: usize, which: usize, j: usize| -> Result<DVector<f64>> {
        let mut v = [y.clone(), y_dot.clone(), u.clone()];
        let h = steps.step(v[which][j]);
        v[which][j] += h;
        let plus = residual(&v[0], &v[1], &v[2]);
        v[which][j] -= 2.0 * h;
        let minus = residual(&v[0], &v[1], &v[2]);
        match (plus, minus) {
            (Ok(p), Ok(q)) if p.iter().chain(q.iter()).all(|x| x.is_finite()) => Ok((p - q) / (2.0 * h)),
            _ => Err(Error::Probe { column }),
        }
    };
    for j in 0..n {
        e.set_column(j, &probe(j, 1, j)?);
    }
    for j in 0..n {
        f.set_column(j, &probe(n + j, 0, j)?);
    }
    for j in 0..m {
        g.set_column(j, &probe(2 * n + j, 2, j)?);
    }
    Ok(Jacobians { e, f, g })
}

/// Jacobians of the aircraft residual at a trim point.
pub fn jacobians(trim: &TrimResult, vehicle: &Vehicle, steps: &StepRule) -> Result<Jacobians> {
    let vehicle = vehicle_for(&trim.condition, vehicle)?;
    let y0 = DVector::from_column_slice(trim.state.as_slice());
    let yd0 = DVector::from_column_slice(trim.state_rate.as_slice());
    let u0 = DVector::from_column_slice(&trim.controls.to_array());
    let residual = |y: &DVector<f64>, yd: &DVector<f64>, u: &DVector<f64>| {
        let ev = vehicle.evaluate_unchecked(
            &SystemState::from_column_slice(y.as_slice()),
            &SystemState::from_column_slice(yd.as_slice()),
            &ControlVector::from_slice(u.as_slice()),
            0.0,
        )?;
        Ok(DVector::from_column_slice(ev.residual.as_slice()))
    };
    jacobians_of(residual, &y0, &yd0, &u0, steps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// 2-norm condition number of E.
    pub condition_number: f64,
    pub trim_state: DVector<f64>,
    pub trim_controls: DVector<f64>,
    pub state_names: Vec<String>,
    pub control_names: Vec<String>,
}

/// Condition numbers above this count as singular.
const MAX_CONDITION: f64 = 1e14;

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Solves `E A = -F`, `E B = -G` by LU factorisation of E.
pub fn extract_ab(jac: &Jacobians) -> Result<(DMatrix<f64>, DMatrix<f64>, f64)> {
    let cond = condition_number(&jac.e);
    if !(cond < MAX_CONDITION) {
        return Err(Error::Extraction { condition: cond });
    }
    let lu = jac.e.clone().lu();
    let a = lu.solve(&(-&jac.f)).ok_or(Error::Extraction { condition: cond })?;
    let b = lu.solve(&(-&jac.g)).ok_or(Error::Extraction { condition: cond })?;
    Ok((a, b, cond))
}

/// Full-order linear model of the aircraft at `trim`.
pub fn linearize(trim: &TrimResult, vehicle: &Vehicle, steps: &StepRule) -> Result<LinearModel> {
    let jac = jacobians(trim, vehicle, steps)?;
    let (a, b, condition_number) = extract_ab(&jac)?;
    Ok(LinearModel {
        a,
        b,
        condition_number,
        trim_state: DVector::from_column_slice(trim.state.as_slice()),
        trim_controls: DVector::from_column_slice(&trim.controls.to_array()),
        state_names: STATE_NAMES.iter().map(|s| s.to_string()).collect(),
        control_names: CONTROL_NAMES.iter().map(|s| s.to_string()).collect(),
    })
}

fn write_matrix(path: &Path, m: &DMatrix<f64>, columns: &[String]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    })?;
    let mut header = vec!["row".to_string()];
    header.extend(columns.iter().cloned());
    let csv_err = |e: csv::Error| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    };
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..m.nrows() {
        let mut rec = vec![STATE_NAMES.get(i).copied().unwrap_or("?").to_string()];
        rec.extend(m.row(i).iter().map(|v| format!("{v:.8e}")));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

impl LinearModel {
    pub fn n_states(&self) -> usize {
        self.a.nrows()
    }

    /// Writes `A.csv`, `B.csv` and `manifest.toml` into `dir`. `extra` is
    /// appended to the manifest verbatim (the CLI uses it for the effective
    /// configuration).
    pub fn write_dir(&self, dir: &Path, condition: &str, extra: Option<&str>) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_matrix(&dir.join("A.csv"), &self.a, &self.state_names)?;
        write_matrix(&dir.join("B.csv"), &self.b, &self.control_names)?;
        let mut s = String::new();
        let _ = writeln!(s, "[model]");
        let _ = writeln!(s, "condition = {condition:?}");
        let _ = writeln!(s, "states = {}", self.n_states());
        let _ = writeln!(s, "controls = {}", N_CONTROLS);
        let _ = writeln!(s, "e_condition_number = {:.8e}", self.condition_number);
        let _ = writeln!(s, "\n[[state]]");
        for (i, name) in self.state_names.iter().enumerate() {
            if i > 0 {
                let _ = writeln!(s, "\n[[state]]");
            }
            let _ = writeln!(s, "index = {i}");
            let _ = writeln!(s, "name = {name:?}");
            let _ = writeln!(s, "unit = {:?}", STATE_UNITS.get(i).copied().unwrap_or("-"));
            let _ = writeln!(s, "trim = {:.8e}", self.trim_state[i]);
        }
        for (i, name) in self.control_names.iter().enumerate() {
            let _ = writeln!(s, "\n[[control]]");
            let _ = writeln!(s, "index = {i}");
            let _ = writeln!(s, "name = {name:?}");
            let _ = writeln!(s, "unit = \"%\"");
            let _ = writeln!(s, "trim = {:.8e}", self.trim_controls[i]);
        }
        if let Some(extra) = extra {
            s.push('\n');
            s.push_str(extra);
        }
        let path = dir.join("manifest.toml");
        std::fs::write(&path, s).map_err(|source| Error::Io { path, source })
    }
}

/// Checks `E A + F = 0` and `E B + G = 0`; returns the two relative errors.
pub fn extraction_residuals(jac: &Jacobians, a: &DMatrix<f64>, b: &DMatrix<f64>) -> (f64, f64) {
    let ra = (&jac.e * a + &jac.f).amax() / jac.f.amax().max(f64::MIN_POSITIVE);
    let rb = (&jac.e * b + &jac.g).amax() / jac.g.amax().max(f64::MIN_POSITIVE);
    (ra, rb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn linear_residual(
        a0: DMatrix<f64>,
        b0: DMatrix<f64>,
    ) -> impl Fn(&DVector<f64>, &DVector<f64>, &DVector<f64>) -> Result<DVector<f64>> {
        move |y, yd, u| Ok(yd - &a0 * y - &b0 * u)
    }

    #[test]
    fn linear_system_recovered() {
        let a0 = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -2.0, -0.3, 0.5, 1.0, 0.0, -4.0]);
        let b0 = DMatrix::from_row_slice(3, 2, &[0.0, 1.0, 2.0, 0.0, -1.0, 3.0]);
        let y = DVector::from_vec(vec![0.1, -2.0, 30.0]);
        let u = DVector::from_vec(vec![50.0, 10.0]);
        let yd = DVector::zeros(3);
        // exact for any step on a linear map; large steps keep roundoff down
        let steps = StepRule { relative: 1e-3, floor: 1e-3 };
        let j = jacobians_of(linear_residual(a0.clone(), b0.clone()), &y, &yd, &u, &steps).unwrap();
        assert!((&j.e - DMatrix::identity(3, 3)).amax() < 1e-9);
        assert!((&j.f + &a0).amax() < 1e-9);
        assert!((&j.g + &b0).amax() < 1e-9);
        let (a, b, cond) = extract_ab(&j).unwrap();
        assert!((a - a0).amax() < 1e-9);
        assert!((b - b0).amax() < 1e-9);
        assert_abs_diff_eq!(cond, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn oscillator_eigenvalues() {
        // x_dd + x = 0 as a first-order system
        let jac = Jacobians {
            e: DMatrix::identity(2, 2),
            f: DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
            g: DMatrix::zeros(2, 1),
        };
        let (a, _, _) = extract_ab(&jac).unwrap();
        let ev = a.complex_eigenvalues();
        for l in ev.iter() {
            assert_abs_diff_eq!(l.re, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(l.im.abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn singular_e_rejected() {
        let jac = Jacobians {
            e: DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]),
            f: DMatrix::identity(2, 2),
            g: DMatrix::zeros(2, 1),
        };
        assert!(matches!(extract_ab(&jac), Err(Error::Extraction { .. })));
    }

    #[test]
    fn probe_failure_names_column() {
        let r = |y: &DVector<f64>, yd: &DVector<f64>, _u: &DVector<f64>| {
            if y[1] > 1.0 {
                Ok(DVector::from_element(2, f64::NAN))
            } else {
                Ok(yd.clone())
            }
        };
        let y = DVector::from_vec(vec![0.0, 1.0]);
        let err = jacobians_of(r, &y, &DVector::zeros(2), &DVector::zeros(1), &StepRule::default());
        assert!(matches!(err, Err(Error::Probe { column: 3 })));
    }

    #[test]
    fn step_rule() {
        let s = StepRule::default();
        assert_eq!(s.step(0.0), 1e-7);
        assert_abs_diff_eq!(s.step(-200.0), 2e-4, epsilon = 1e-18);
    }
}
