use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use trac::lqr::{design_lqr, solve_care, steady_state_targets};

/// Random 3-state, 2-input system with full-rank B (always stabilisable).
fn system() -> impl Strategy<Value = (DMatrix<f64>, DMatrix<f64>, Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-2.0..2.0f64, 9),
        prop::collection::vec(-1.0..1.0f64, 6),
        prop::collection::vec(0.1..10.0f64, 3),
        prop::collection::vec(0.1..10.0f64, 2),
    )
        .prop_filter_map("B must have full column rank", |(a, b, q, r)| {
            let a = DMatrix::from_row_slice(3, 3, &a);
            let mut b = DMatrix::from_row_slice(3, 2, &b);
            b[(0, 0)] += 1.5;
            b[(1, 1)] += 1.5;
            (b.singular_values().min() > 0.2).then_some((a, b, q, r))
        })
}

fn rk4_error(acl: &DMatrix<f64>, e0: &DVector<f64>, t_end: f64) -> DVector<f64> {
    let dt = 0.01;
    let mut e = e0.clone();
    for _ in 0..(t_end / dt) as usize {
        let k1 = acl * &e;
        let k2 = acl * (&e + &k1 * (dt / 2.0));
        let k3 = acl * (&e + &k2 * (dt / 2.0));
        let k4 = acl * (&e + &k3 * dt);
        e += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn riccati_residual_is_small((a, b, q, r) in system()) {
        let q = DMatrix::from_diagonal(&DVector::from_vec(q));
        let r = DMatrix::from_diagonal(&DVector::from_vec(r));
        let p = solve_care(&a, &b, &q, &r).unwrap();
        let rinv = r.clone().try_inverse().unwrap();
        let res = a.transpose() * &p + &p * &a - &p * &b * rinv * b.transpose() * &p + &q;
        prop_assert!(res.amax() < 1e-8 * q.amax());
        prop_assert!((&p - p.transpose()).amax() < 1e-10 * p.amax().max(1.0));
        prop_assert!(p.symmetric_eigenvalues().min() > -1e-9);
    }

    #[test]
    fn closed_loop_is_hurwitz_and_scale_free((a, b, q, r) in system(), scale in 0.01..100.0f64) {
        let q = DMatrix::from_diagonal(&DVector::from_vec(q));
        let r = DMatrix::from_diagonal(&DVector::from_vec(r));
        let g = design_lqr(&a, &b, &q, &r).unwrap();
        prop_assert!(g.spectral_abscissa < 0.0);
        let gs = design_lqr(&a, &b, &(&q * scale), &(&r * scale)).unwrap();
        prop_assert!((&g.k - &gs.k).amax() < 1e-9 * g.k.amax().max(1.0));
    }

    #[test]
    fn tracked_outputs_converge((a, b, q, r) in system(), y in prop::collection::vec(-5.0..5.0f64, 2),
                                x0 in prop::collection::vec(-5.0..5.0f64, 3)) {
        let q = DMatrix::from_diagonal(&DVector::from_vec(q));
        let r = DMatrix::from_diagonal(&DVector::from_vec(r));
        let cs = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let ds = DMatrix::zeros(2, 2);
        let y_ss = DVector::from_vec(y);
        let targets = steady_state_targets(&a, &b, &cs, &ds, &y_ss);
        prop_assume!(targets.is_ok());
        let (x_ss, u_ss) = targets.unwrap();
        prop_assert!((&a * &x_ss + &b * &u_ss).amax() < 1e-9 * (1.0 + x_ss.amax() + u_ss.amax()));
        prop_assert!((&cs * &x_ss - &y_ss).amax() < 1e-9 * (1.0 + y_ss.amax()));

        let g = design_lqr(&a, &b, &q, &r).unwrap();
        let acl = &a - &b * &g.k;
        // Under u = u_ss - K (x - x_ss) the error obeys e' = (A - B K) e.
        let settle = 40.0 / (-g.spectral_abscissa).max(0.05);
        let e = rk4_error(&acl, &(DVector::from_vec(x0) - &x_ss), settle.min(400.0));
        prop_assert!((&cs * e).amax() < 1e-6);
    }
}
