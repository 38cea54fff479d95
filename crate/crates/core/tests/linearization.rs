use nalgebra::{DMatrix, DVector};
use trac::linmod::{jacobians, jacobians_of, linearize, LinearModel, StepRule};
use trac::trim::{solve_trim, FlightCondition, TrimOptions, TrimResult};
use trac::vehicle::state::*;
use trac::{Vehicle, VehicleConfig};

fn setup(kts: f64) -> (Vehicle, TrimResult) {
    let v = Vehicle::at_altitude(VehicleConfig::default(), 5_250.0).unwrap();
    let t = solve_trim(&FlightCondition::level(kts, 16_000.0, 5_250.0), &v, None, &TrimOptions::default()).unwrap();
    (v, t)
}

#[test]
fn linearizing_twice_is_bitwise_identical() {
    let (v, t) = setup(60.0);
    let a: LinearModel = linearize(&t, &v, &StepRule::default()).unwrap();
    let b = linearize(&t, &v, &StepRule::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mass_sits_on_the_acceleration_columns() {
    let (v, t) = setup(0.0);
    let jac = jacobians(&t, &v, &StepRule::default()).unwrap();
    let m = v.config.mass.mass;
    for i in [U, V, W] {
        assert!((jac.e[(i, i)] + m).abs() < 1e-7 * m, "E[{i},{i}] = {}", jac.e[(i, i)]);
    }
}

#[test]
fn euler_rows_depend_only_on_rates_and_attitude() {
    for kts in [0.0, 100.0] {
        let (v, t) = setup(kts);
        let model = linearize(&t, &v, &StepRule::default()).unwrap();
        for row in [PHI, THETA, PSI] {
            for col in 0..N_STATES {
                if ![P, Q, R, PHI, THETA].contains(&col) {
                    assert_eq!(model.a[(row, col)], 0.0, "{kts} kts: d{}/d{}", STATE_NAMES[row], STATE_NAMES[col]);
                }
            }
        }
        // Heading never feeds back.
        assert_eq!(model.a.column(PSI).amax(), 0.0);
    }
}

#[test]
fn central_differences_are_second_order_on_a_smooth_residual() {
    // eps = y_dot - (sin(y0) y1, exp(y0) - u y1)
    let residual = |y: &DVector<f64>, yd: &DVector<f64>, u: &DVector<f64>| -> trac::Result<DVector<f64>> {
        Ok(DVector::from_vec(vec![
            yd[0] - y[0].sin() * y[1],
            yd[1] - (y[0].exp() - u[0] * y[1]),
        ]))
    };
    let (y, yd, u) = (
        DVector::from_vec(vec![0.7, -1.3]),
        DVector::zeros(2),
        DVector::from_vec(vec![0.4]),
    );
    let exact_f = DMatrix::from_row_slice(2, 2, &[-(0.7f64.cos()) * -1.3, -(0.7f64.sin()), -(0.7f64.exp()), 0.4]);
    let err = |h: f64| {
        let j = jacobians_of(residual, &y, &yd, &u, &StepRule { relative: h, floor: h }).unwrap();
        assert!((&j.e - DMatrix::identity(2, 2)).amax() < 1e-12);
        (j.f - &exact_f).amax()
    };
    let ratio = err(1e-2) / err(5e-3);
    assert!((3.9..4.1).contains(&ratio), "halving ratio {ratio}");
}

#[test]
fn aircraft_jacobian_is_insensitive_to_the_probe_step() {
    // Airfoil tables are piecewise linear, so refinement is not cleanly
    // second order here; columns must still agree closely.
    let (v, t) = setup(100.0);
    let base = jacobians(&t, &v, &StepRule::default()).unwrap();
    let half = jacobians(&t, &v, &StepRule { relative: 5e-7, floor: 5e-8 }).unwrap();
    assert!((&base.f - &half.f).amax() < 1e-6 * base.f.amax());
    assert!((&base.g - &half.g).amax() < 1e-6 * base.g.amax());
}
