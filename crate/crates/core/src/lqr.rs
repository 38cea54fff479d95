//! Continuous-time LQR with set-point tracking.
//!
//! The Riccati equation is solved from the stable invariant subspace of the
//! Hamiltonian matrix, found with the scaled matrix-sign iteration, and
//! then polished with Newton-Kleinman steps until the residual is small.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vehicle::ControlVector;

const SIGN_MAX_ITER: usize = 100;
const REFINE_MAX_ITER: usize = 20;

fn riccati_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>, r_inv: &DMatrix<f64>, p: &DMatrix<f64>) -> DMatrix<f64> {
    a.transpose() * p + p * a - p * b * r_inv * b.transpose() * p + q
}

/// Solves `Ac' X + X Ac + C = 0` through the Kronecker form.
pub fn solve_lyapunov(ac: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = ac.nrows();
    let at = ac.transpose();
    let eye = DMatrix::<f64>::identity(n, n);
    let big = eye.kronecker(&at) + at.kronecker(&eye);
    let rhs = -DVector::from_column_slice(c.as_slice());
    let x = big
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Riccati("Lyapunov operator singular".into()))?;
    Ok(DMatrix::from_column_slice(n, n, x.as_slice()))
}

fn matrix_sign(h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = h.nrows();
    let mut z = h.clone();
    for _ in 0..SIGN_MAX_ITER {
        let lu = z.clone().lu();
        let det = lu.determinant();
        let zi = lu
            .try_inverse()
            .ok_or_else(|| Error::Riccati("Hamiltonian has eigenvalues on the imaginary axis".into()))?;
        // determinant scaling speeds up the early iterations
        let c = if det.is_finite() && det != 0.0 {
            det.abs().powf(-1.0 / n as f64)
        } else {
            1.0
        };
        let next = (&z * c + zi / c) * 0.5;
        let change = (&next - &z).norm() / next.norm();
        z = next;
        if change < 1e-13 {
            return Ok(z);
        }
    }
    if z.iter().all(|v| v.is_finite()) {
        Ok(z)
    } else {
        Err(Error::Riccati("sign iteration diverged".into()))
    }
}

/// Stabilising solution of `A'P + PA - P B R^-1 B' P + Q = 0`.
pub fn solve_care(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || q.shape() != (n, n) || r.shape() != (b.ncols(), b.ncols()) {
        return Err(Error::InvalidArgument("solve_care: dimension mismatch".into()));
    }
    let r_inv = r
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Riccati("R is not positive definite".into()))?
        .inverse();
    let s = b * &r_inv * b.transpose();

    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-&s));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));
    let w = matrix_sign(&h)?;

    // stable subspace spans null(W + I): [W12; W22 + I] P = -[W11 + I; W21]
    let eye = DMatrix::<f64>::identity(n, n);
    let mut lhs = DMatrix::zeros(2 * n, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(&w.view((0, n), (n, n)));
    lhs.view_mut((n, 0), (n, n)).copy_from(&(w.view((n, n), (n, n)) + &eye));
    let mut rhs = DMatrix::zeros(2 * n, n);
    rhs.view_mut((0, 0), (n, n)).copy_from(&(-(w.view((0, 0), (n, n)) + &eye)));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(-w.view((n, 0), (n, n))));
    let mut p = lhs
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Riccati(format!("subspace solve: {e}")))?;
    p = (&p + p.transpose()) * 0.5;

    // Newton-Kleinman refinement
    let scale = q.amax().max(s.amax()).max(f64::MIN_POSITIVE);
    let tol = 1e-8 * q.amax().max(1e-300);
    let mut res = riccati_residual(a, b, q, &r_inv, &p);
    for _ in 0..REFINE_MAX_ITER {
        if res.amax() <= tol || res.amax() <= 1e-14 * scale {
            break;
        }
        let ac = a - &s * &p;
        let dp = solve_lyapunov(&ac, &res)?;
        let cand = &p + (&dp + dp.transpose()) * 0.5;
        let cand_res = riccati_residual(a, b, q, &r_inv, &cand);
        if cand_res.amax() >= res.amax() {
            break;
        }
        p = cand;
        res = cand_res;
    }
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::Riccati("non-finite solution".into()));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    /// m x n feedback gain.
    pub k: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub p: DMatrix<f64>,
    /// Largest real part among the closed-loop eigenvalues.
    pub spectral_abscissa: f64,
}

fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
}

/// LQR gains. Fails unless the closed loop is strictly stable.
pub fn design_lqr(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<GainSet> {
    if (q - q.transpose()).amax() > 1e-12 * q.amax().max(1.0) || (r - r.transpose()).amax() > 1e-12 * r.amax() {
        return Err(Error::InvalidArgument("Q and R must be symmetric".into()));
    }
    if q.symmetric_eigenvalues().min() < -1e-12 * q.amax().max(1.0) {
        return Err(Error::InvalidArgument("Q must be positive semi-definite".into()));
    }
    let p = solve_care(a, b, q, r)?;
    let k = r
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Riccati("R is not positive definite".into()))?
        .solve(&(b.transpose() * &p));
    let sa = spectral_abscissa(&(a - b * &k));
    if !(sa < 0.0) {
        return Err(Error::Riccati(format!(
            "closed loop not stable (max real part {sa:.3e}); pair may not be stabilisable"
        )));
    }
    Ok(GainSet {
        k,
        q: q.clone(),
        r: r.clone(),
        p,
        spectral_abscissa: sa,
    })
}

/// Tracked-output selection and the resulting steady-state map.
#[derive(Debug, Clone, PartialEq)]
pub struct SetPoint {
    pub cs: DMatrix<f64>,
    pub ds: DMatrix<f64>,
    // columns of the block inverse that multiply y_ss
    x_map: DMatrix<f64>,
    u_map: DMatrix<f64>,
}

impl SetPoint {
    pub fn new(a: &DMatrix<f64>, b: &DMatrix<f64>, cs: DMatrix<f64>, ds: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let m = b.ncols();
        if cs.shape() != (m, n) || ds.shape() != (m, m) {
            return Err(Error::InvalidArgument(format!(
                "set point needs exactly {m} tracked outputs over {n} states"
            )));
        }
        let size = n + m;
        let mut block = DMatrix::zeros(size, size);
        block.view_mut((0, 0), (n, n)).copy_from(a);
        block.view_mut((0, n), (n, m)).copy_from(b);
        block.view_mut((n, 0), (m, n)).copy_from(&cs);
        block.view_mut((n, n), (m, m)).copy_from(&ds);
        let sv = block.singular_values();
        let tol = sv.max() * size as f64 * f64::EPSILON * 1e3;
        let rank = sv.iter().filter(|s| **s > tol).count();
        if rank < size {
            return Err(Error::InfeasibleSetPoint { rank, size });
        }
        let mut rhs = DMatrix::zeros(size, m);
        rhs.view_mut((n, 0), (m, m)).fill_with_identity();
        let sol = block
            .lu()
            .solve(&rhs)
            .ok_or(Error::InfeasibleSetPoint { rank, size })?;
        Ok(Self {
            cs,
            ds,
            x_map: sol.rows(0, n).into_owned(),
            u_map: sol.rows(n, m).into_owned(),
        })
    }

    /// (x_ss, u_ss) for reference `y_ss`.
    pub fn targets(&self, y_ss: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        (&self.x_map * y_ss, &self.u_map * y_ss)
    }
}

/// Steady state (x_ss, u_ss) meeting `A x + B u = 0`, `Cs x + Ds u = y_ss`.
pub fn steady_state_targets(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    cs: &DMatrix<f64>,
    ds: &DMatrix<f64>,
    y_ss: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    Ok(SetPoint::new(a, b, cs.clone(), ds.clone())?.targets(y_ss))
}

/// Control output after clamping to the stick limits.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlCommand {
    /// Absolute stick positions (percent).
    pub controls: ControlVector,
    /// Increment over trim actually applied.
    pub increment: DVector<f64>,
    pub saturated: [bool; 4],
}

/// `du = u_ss - K (x - x_ss)`, added to `trim` and clamped to [0, 100].
pub fn control_law(
    k: &DMatrix<f64>,
    x: &DVector<f64>,
    x_ss: &DVector<f64>,
    u_ss: &DVector<f64>,
    trim: &ControlVector,
) -> ControlCommand {
    let du = u_ss - k * (x - x_ss);
    let base = trim.to_array();
    let mut out = [0.0; 4];
    let mut saturated = [false; 4];
    for i in 0..4 {
        let v = base[i] + du[i];
        out[i] = v.clamp(0.0, 100.0);
        saturated[i] = v != out[i];
    }
    ControlCommand {
        controls: ControlVector::from_array(out),
        increment: DVector::from_iterator(4, (0..4).map(|i| out[i] - base[i])),
        saturated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(r: usize, c: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(r, c, v)
    }

    #[test]
    fn scalar_riccati() {
        let p = solve_care(&m(1, 1, &[0.0]), &m(1, 1, &[1.0]), &m(1, 1, &[1.0]), &m(1, 1, &[1.0])).unwrap();
        assert_abs_diff_eq!(p[(0, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn double_integrator() {
        let a = m(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = m(2, 1, &[0.0, 1.0]);
        let g = design_lqr(&a, &b, &DMatrix::identity(2, 2), &m(1, 1, &[1.0])).unwrap();
        assert_abs_diff_eq!(g.k[(0, 0)], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g.k[(0, 1)], 3f64.sqrt(), epsilon = 1e-10);
        assert!(g.spectral_abscissa < 0.0);
    }

    #[test]
    fn zero_weight_on_stable_plant() {
        let a = m(2, 2, &[-1.0, 0.5, 0.0, -2.0]);
        let b = m(2, 1, &[0.0, 1.0]);
        let g = design_lqr(&a, &b, &DMatrix::zeros(2, 2), &m(1, 1, &[1.0])).unwrap();
        assert!(g.p.amax() < 1e-12);
        assert!(g.k.amax() < 1e-12);
    }

    #[test]
    fn unstabilisable_pair_rejected() {
        let a = m(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let b = m(2, 1, &[0.0, 1.0]);
        assert!(design_lqr(&a, &b, &DMatrix::identity(2, 2), &m(1, 1, &[1.0])).is_err());
    }

    #[test]
    fn targets() {
        let (x, u) = steady_state_targets(
            &m(1, 1, &[-1.0]),
            &m(1, 1, &[1.0]),
            &m(1, 1, &[1.0]),
            &m(1, 1, &[0.0]),
            &DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u[0], 1.0, epsilon = 1e-12);
        let err = SetPoint::new(&m(1, 1, &[0.0]), &m(1, 1, &[0.0]), m(1, 1, &[1.0]), m(1, 1, &[0.0]));
        assert!(matches!(err, Err(Error::InfeasibleSetPoint { rank: 1, size: 2 })));
    }

    #[test]
    fn clamp_flags() {
        let k = DMatrix::zeros(4, 2);
        let x = DVector::zeros(2);
        let u_ss = DVector::from_vec(vec![55.0, 0.0, -60.0, 0.0]);
        let c = control_law(&k, &x, &x, &u_ss, &ControlVector::neutral());
        assert_eq!(c.controls.collective, 100.0);
        assert_eq!(c.controls.longitudinal, 0.0);
        assert_eq!(c.saturated, [true, false, true, false]);
        assert_abs_diff_eq!(c.increment[0], 50.0);
    }
}
