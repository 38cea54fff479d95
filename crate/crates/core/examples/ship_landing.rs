//! Autonomous approach and landing on a moving ship. Optional arguments
//! are scenario overrides, e.g. `ship.speed_kts=0`.
//!
//!     cargo run --release --example ship_landing -- [key=value ...]

use trac::mission::{Mission, Scenario};
use trac::{Vehicle, VehicleConfig};

fn main() -> trac::Result<()> {
    let overrides: Vec<String> = std::env::args().skip(1).collect();
    let scenario = Scenario::load(None, &overrides)?;
    let vehicle = Vehicle::at_altitude(VehicleConfig::default(), scenario.aircraft.altitude_ft)?;

    let start = std::time::Instant::now();
    let mission = Mission::prepare(&scenario, &vehicle)?;
    println!("designed {} phase controllers in {:.1} s", mission.phases.len(), start.elapsed().as_secs_f64());
    for p in &mission.phases {
        println!(
            "  {:<24} starts {:7.2} s  trim {:5.1} kts  spectral abscissa {:+.3}",
            p.kind.name(),
            p.lead_time,
            p.controller.trim.condition.airspeed_kts,
            p.controller.gains.spectral_abscissa
        );
    }

    let run = mission.run();
    println!("flew {:.1} s in {:.1} s wall", run.log.duration(), start.elapsed().as_secs_f64());
    for r in run.log.records.iter().step_by(500) {
        println!(
            "  t {:6.1}  {:<24} x {:8.1}  y {:7.1}  alt {:6.1} m   ship - heli ({:+7.2}, {:+7.2}, {:+6.2})",
            r.time,
            r.phase.name(),
            r.position.x,
            r.position.y,
            -r.position.z,
            r.relative.x,
            r.relative.y,
            -r.relative.z
        );
    }
    print!("{}", run.report_text());
    if let Some(reason) = &run.failure {
        return Err(trac::Error::Mission(reason.clone()));
    }
    Ok(())
}
