//! Main- and tail-rotor loads at trim across the speed range, plus the
//! blade's rotating flap and lag frequencies.
//!
//!     cargo run --release --example rotor_loads

use trac::rotor::flap::natural_frequencies;
use trac::trim::{solve_trim, FlightCondition, TrimOptions};
use trac::{Vehicle, VehicleConfig};

fn main() -> trac::Result<()> {
    let vehicle = Vehicle::at_altitude(VehicleConfig::default(), 5_250.0)?;
    let geom = &vehicle.config.main_rotor;
    let (flap, lag) = natural_frequencies(geom);
    println!(
        "rotating frequencies: flap {:.4}/rev, lag {:.4}/rev (Omega {:.2} rad/s)",
        flap / geom.omega,
        lag / geom.omega,
        geom.omega
    );

    println!(
        "{:>5} {:>6} {:>9} {:>8} {:>9} {:>8} {:>8} {:>8} {:>8}",
        "kts", "mu", "T lbf", "CT", "Q ft-lbf", "hp", "TR lbf", "TR hp", "skew"
    );
    let mut seed = None;
    for kts in [0.0, 40.0, 80.0, 120.0, 160.0] {
        let cond = FlightCondition::level(kts, 16_000.0, 5_250.0);
        let t = solve_trim(&cond, &vehicle, seed.as_ref(), &TrimOptions::default())?;
        seed = Some(t.unknowns());
        let mr = &t.evaluation.main_rotor;
        let tr = &t.evaluation.tail_rotor;
        let tr_power = tr.torque * vehicle.config.tail_rotor.omega / 550.0;
        println!(
            "{kts:5.0} {:6.3} {:9.1} {:8.5} {:9.0} {:8.1} {:8.1} {:8.1} {:8.2}",
            mr.mu,
            mr.thrust,
            mr.ct,
            mr.torque,
            mr.power / 550.0,
            tr.thrust,
            tr_power,
            t.evaluation.wake_skew.to_degrees()
        );
        let f = mr.hub_force;
        let m = mr.hub_moment;
        println!(
            "      hub force ({:+8.1}, {:+8.1}, {:+8.1}) lbf  moment ({:+9.1}, {:+9.1}, {:+9.1}) ft-lbf",
            f.x, f.y, f.z, m.x, m.y, m.z
        );
    }
    Ok(())
}
