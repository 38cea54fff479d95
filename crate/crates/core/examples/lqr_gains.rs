//! LQR design for the 60-kt level-flight model: gain size, closed-loop
//! poles and the steady-state set-point for a 5 ft/s speed increase.
//!
//!     cargo run --release --example lqr_gains

use nalgebra::DVector;
use trac::mission::{PhaseController, PhaseKind, Weights, TRACKED_OUTPUTS};
use trac::trim::FlightCondition;
use trac::{Vehicle, VehicleConfig};

fn main() -> trac::Result<()> {
    let cond = FlightCondition::level(60.0, 16_000.0, 0.0);
    let vehicle = Vehicle::at_altitude(VehicleConfig::default(), cond.altitude)?;
    let c = PhaseController::design(PhaseKind::ForwardFlight, &cond, &vehicle, &Weights::default(), None)?;

    println!("regulated states {}, controls {}", c.a.nrows(), c.b.ncols());
    println!("largest |K| entry {:.4e}", c.gains.k.amax());
    println!("spectral abscissa {:.5} 1/s", c.gains.spectral_abscissa);

    let mut open: Vec<_> = c.a.complex_eigenvalues().iter().copied().collect();
    let mut closed = c.closed_loop_eigenvalues();
    open.sort_by(|a, b| b.re.total_cmp(&a.re));
    closed.sort_by(|a, b| b.re.total_cmp(&a.re));
    println!("slowest poles, open loop -> closed loop:");
    for (o, k) in open.iter().zip(&closed).take(8) {
        println!("  {:+9.4} {:+9.4}i   ->  {:+9.4} {:+9.4}i", o.re, o.im, k.re, k.im);
    }

    let dy = DVector::from_row_slice(&[5.0, 0.0, 0.0, 0.0]);
    let (x_ss, u_ss) = c.set_point.targets(&dy);
    println!("set-point for +5 ft/s {}:", TRACKED_OUTPUTS[0]);
    println!("  stick change (%) {:?}", u_ss.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>());
    let residual = (&c.a * &x_ss + &c.b * &u_ss).amax();
    println!("  |A x + B u| = {residual:.2e}");
    Ok(())
}
