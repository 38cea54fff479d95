//! Linear model at a level-flight trim: eigenvalues and a few derivatives.
//!
//!     cargo run --release --example linearize -- 60 /tmp/model60

use std::path::Path;

use trac::linmod::{linearize, StepRule};
use trac::trim::{solve_trim, FlightCondition, TrimOptions};
use trac::vehicle::state::{STATE_NAMES, U, W, Q, THETA};
use trac::{Vehicle, VehicleConfig};

fn main() -> trac::Result<()> {
    let mut args = std::env::args().skip(1);
    let kts: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let condition = FlightCondition::level(kts, 16_000.0, 5_250.0);
    let vehicle = Vehicle::at_altitude(VehicleConfig::default(), condition.altitude)?;
    let trim = solve_trim(&condition, &vehicle, None, &TrimOptions::default())?;
    let model = linearize(&trim, &vehicle, &StepRule::default())?;
    println!("{kts} kts: E condition number {:.3e}", model.condition_number);

    let mut eig: Vec<_> = model.a.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    println!("eigenvalues (1/s):");
    for l in &eig {
        println!("  {:+12.5} {:+12.5}i", l.re, l.im);
    }
    println!("selected derivatives:");
    for (r, c) in [(U, U), (W, W), (Q, U), (Q, Q), (THETA, Q)] {
        println!("  d({})/d({}) = {:+.5e}", STATE_NAMES[r], STATE_NAMES[c], model.a[(r, c)]);
    }
    if let Some(dir) = args.next() {
        model.write_dir(Path::new(&dir), &format!("level flight {kts} kts"), None)?;
        println!("wrote {dir}");
    }
    Ok(())
}
