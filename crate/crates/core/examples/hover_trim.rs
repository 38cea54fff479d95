//! Hover trim at 16,000 lb and 5,250 ft.
//!
//!     cargo run --release --example hover_trim

use trac::trim::{solve_trim, FlightCondition, TrimOptions};
use trac::vehicle::state::STATE_NAMES;
use trac::{Vehicle, VehicleConfig};

fn main() -> trac::Result<()> {
    let condition = FlightCondition::hover(16_000.0, 5_250.0);
    let vehicle = Vehicle::at_altitude(VehicleConfig::default(), condition.altitude)?;
    let t = solve_trim(&condition, &vehicle, None, &TrimOptions::default())?;
    println!("converged in {} iterations, residual {:.2e}", t.iterations, t.residual_norm);
    println!("power {:.1} hp", t.power_hp);
    let c = t.controls;
    println!(
        "controls: collective {:.2}%  lateral {:.2}%  longitudinal {:.2}%  pedal {:.2}%",
        c.collective, c.lateral, c.longitudinal, c.pedal
    );
    for (name, v) in STATE_NAMES.iter().zip(t.state.iter()) {
        println!("  {name:>10} {v:+.6e}");
    }
    for l in &t.evaluation.loads.components {
        println!(
            "  {:>15}: F = ({:+9.1}, {:+9.1}, {:+9.1}) lbf  M = ({:+9.1}, {:+9.1}, {:+9.1}) ft*lbf",
            l.source.as_str(),
            l.x(),
            l.y(),
            l.z(),
            l.l(),
            l.m(),
            l.n()
        );
    }
    Ok(())
}
