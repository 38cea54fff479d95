//! Prints grid coverage of the built-in tables and a few lookups. With a
//! directory argument, writes the tables there as CSV.
//!
//!     cargo run --example tables -- /tmp/tables

use std::path::Path;

use trac::tables::{TableSet, WakeReceiver};

fn main() -> trac::Result<()> {
    let set = TableSet::default();
    let rotor = &set.rotor_airfoil;
    let alpha = rotor.alpha_grid();
    println!(
        "rotor airfoil: {} alpha x {} mach, alpha {:.1}..{:.1} deg",
        alpha.len(),
        rotor.mach_grid().len(),
        alpha[0].to_degrees(),
        alpha[alpha.len() - 1].to_degrees()
    );
    for a in [0.0f64, 4.0, 8.0, 12.0, 16.0, 20.0] {
        let c = rotor.lookup(a.to_radians(), 0.5);
        println!("  alpha {a:5.1} deg, M 0.5: cl {:.4} cd {:.5}", c.cl, c.cd);
    }
    for chi in [0.0f64, 30.0, 60.0, 90.0] {
        let (vx, vz) = set.interference.lookup(chi.to_radians(), 0.0, WakeReceiver::HorizontalTail);
        println!("horizontal tail wake factors at skew {chi:4.0} deg: vx {vx:.3} vz {vz:.3}");
    }
    for kts in [0.0, 40.0, 80.0, 120.0] {
        println!(
            "stabilator at {kts:5.1} kts: {:.1} deg",
            set.stabilator.incidence(kts).to_degrees()
        );
    }
    if let Some(dir) = std::env::args().nth(1) {
        set.write_dir(Path::new(&dir))?;
        println!("wrote tables to {dir}");
    }
    Ok(())
}
