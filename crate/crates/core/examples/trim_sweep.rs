//! Level-flight power curve at 16,000 lb and 5,250 ft, 0 to 160 kts.
//!
//!     cargo run --release --example trim_sweep -- [step_kts] [out.csv]

use trac::trim::{trim_sweep, write_sweep_csv, FlightCondition, TrimOptions};
use trac::{Vehicle, VehicleConfig};

fn main() -> trac::Result<()> {
    let mut args = std::env::args().skip(1);
    let step: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20.0);
    let speeds: Vec<f64> = (0..).map(|i| i as f64 * step).take_while(|v| *v <= 160.0).collect();

    let template = FlightCondition::level(0.0, 16_000.0, 5_250.0);
    let vehicle = Vehicle::at_altitude(VehicleConfig::default(), template.altitude)?;
    let start = std::time::Instant::now();
    let points = trim_sweep(&speeds, &template, &vehicle, &TrimOptions::default())?;
    let elapsed = start.elapsed().as_secs_f64();

    println!("{:>6} {:>9} {:>8} {:>7} {:>7} {:>7} {:>7} {:>5}", "kts", "hp", "pitch", "col%", "lat%", "lon%", "ped%", "iter");
    for p in &points {
        match &p.result {
            Ok(t) => {
                let c = t.controls;
                println!(
                    "{:6.1} {:9.1} {:8.3} {:7.2} {:7.2} {:7.2} {:7.2} {:5}",
                    p.speed_kts,
                    t.power_hp,
                    t.state[trac::vehicle::state::THETA].to_degrees(),
                    c.collective,
                    c.lateral,
                    c.longitudinal,
                    c.pedal,
                    t.iterations
                );
            }
            Err(e) => println!("{:6.1} failed: {e}", p.speed_kts),
        }
    }
    let best = points
        .iter()
        .filter_map(|p| p.result.as_ref().ok())
        .min_by(|a, b| a.power_hp.total_cmp(&b.power_hp));
    if let Some(b) = best {
        println!("minimum power {:.1} hp at {} kts", b.power_hp, b.condition.airspeed_kts);
    }
    println!("{} points in {elapsed:.1} s", points.len());
    if let Some(path) = args.next() {
        let file = std::fs::File::create(&path).map_err(|source| trac::Error::Io { path: path.clone().into(), source })?;
        write_sweep_csv(&points, file)?;
        println!("wrote {path}");
    }
    Ok(())
}
