//! Flight log: one record per control step.

use std::io::Write;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::loads::{LoadSource, Loads};
use crate::vehicle::state::{CONTROL_NAMES, PHI, PSI, STATE_NAMES, THETA};
use crate::vehicle::{ControlVector, SystemState};

use super::plan::PhaseKind;

#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub time: f64,
    pub phase: PhaseKind,
    pub state: SystemState,
    pub controls: ControlVector,
    /// Earth position of the CG (m, NED).
    pub position: Vector3<f64>,
    /// Ship pad minus helicopter CG (m).
    pub relative: Vector3<f64>,
    /// Per-component loads in `LoadSource::COMPONENTS` order.
    pub loads: [Loads; 5],
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlightLog {
    /// Sample interval (s).
    pub interval: f64,
    pub records: Vec<LogRecord>,
    /// Index of the first record with the gear on the deck.
    pub touchdown: Option<usize>,
}

/// Column order of [`FlightLog::write_csv`]: time, phase, earth position,
/// relative distance, the 25 states, the 4 sticks, then force and moment
/// components for each load source.
pub fn log_columns() -> Vec<String> {
    let mut cols: Vec<String> = ["time_s", "phase", "x_m", "y_m", "z_m", "dx_m", "dy_m", "dz_m"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(STATE_NAMES.iter().map(|s| s.to_string()));
    cols.extend(CONTROL_NAMES.iter().map(|s| format!("{s}_pct")));
    for src in LoadSource::COMPONENTS {
        for q in ["fx", "fy", "fz", "mx", "my", "mz"] {
            cols.push(format!("{src}_{q}"));
        }
    }
    cols
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<flight log>".into(),
        source: e,
    }
}

impl FlightLog {
    pub fn new(interval: f64) -> Self {
        Self {
            interval,
            records: Vec::new(),
            touchdown: None,
        }
    }

    pub fn duration(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.time)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| io_err(std::io::Error::other(e));
        w.write_record(log_columns()).map_err(csv_err)?;
        let mut row: Vec<String> = Vec::with_capacity(100);
        for r in &self.records {
            row.clear();
            row.push(format!("{:.8e}", r.time));
            row.push(r.phase.name().to_string());
            let nums = r
                .position
                .iter()
                .chain(r.relative.iter())
                .chain(r.state.iter())
                .copied()
                .chain(r.controls.to_array())
                .chain(r.loads.iter().flat_map(|l| l.force.iter().chain(l.moment.iter()).copied()));
            row.extend(nums.map(|v| format!("{v:.8e}")));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Plain-text flight-data-recorder export for replay tools. Positions
    /// are placed on a flat-earth grid around `origin` (deg latitude,
    /// longitude); altitude is in feet. Not a complete recorder format.
    pub fn write_fdr<W: Write>(&self, mut out: W, origin: (f64, f64)) -> Result<()> {
        const M_PER_DEG: f64 = 111_320.0;
        writeln!(out, "A\n1\n\nACFT, Aircraft/Helicopters/UH60.acf\nTAIL, TRAC01\n").map_err(io_err)?;
        writeln!(out, "COMM, time, lon, lat, alt_ft, heading_deg, pitch_deg, roll_deg").map_err(io_err)?;
        for r in &self.records {
            let lat = origin.0 + r.position[0] / M_PER_DEG;
            let lon = origin.1 + r.position[1] / (M_PER_DEG * origin.0.to_radians().cos());
            writeln!(
                out,
                "DATA, {:.3}, {:.8}, {:.8}, {:.2}, {:.3}, {:.3}, {:.3}",
                r.time,
                lon,
                lat,
                -r.position[2] / 0.3048,
                r.state[PSI].to_degrees().rem_euclid(360.0),
                r.state[THETA].to_degrees(),
                r.state[PHI].to_degrees()
            )
            .map_err(io_err)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_match_rows() {
        let rec = LogRecord {
            time: 0.0,
            phase: PhaseKind::InitialDescent,
            state: SystemState::zeros(),
            controls: ControlVector::neutral(),
            position: Vector3::zeros(),
            relative: Vector3::zeros(),
            loads: LoadSource::COMPONENTS.map(Loads::zero),
        };
        let log = FlightLog {
            interval: 0.02,
            records: vec![rec],
            touchdown: None,
        };
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
        assert_eq!(lines[0].split(',').count(), 8 + 25 + 4 + 30);
    }
}
