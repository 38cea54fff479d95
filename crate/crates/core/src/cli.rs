//! Command-line front end. `run_cli` returns the process exit code:
//! 0 success, 1 usage, 2 configuration or I/O, 3 solver failure,
//! 4 simulation failure. Failures print one line to stderr of the form
//! `trac: exit=<code> kind=<kind> reason=<text>`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linmod::{linearize, StepRule};
use crate::mission::{Mission, Scenario};
use crate::tables::{
    bundled_dir, AirfoilTable, InterferenceTable, StabilatorSchedule, INTERFERENCE_FILE, ROTOR_AIRFOIL_FILE,
    STABILATOR_FILE, TABLES_DIR_ENV, TAIL_AIRFOIL_FILE,
};
use crate::trim::{solve_trim, trim_sweep, write_sweep_csv, FlightCondition, TrimOptions, TrimResult};
use crate::vehicle::config::ConfigFile;
use crate::vehicle::state::{CONTROL_NAMES, STATE_NAMES, STATE_UNITS};
use crate::vehicle::Vehicle;

const DEFAULT_ALTITUDE_FT: f64 = 5_250.0;
const DEFAULT_SPEEDS: &str = "0:20:160";

#[derive(Debug, Parser)]
#[command(name = "trac", version, about = "Rotorcraft trim, linearization and ship-landing simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trim one flight condition and write the trimmed state as CSV.
    Trim(TrimArgs),
    /// Trim a range of level-flight speeds and write one CSV row per speed.
    Sweep(SweepArgs),
    /// Linearize about a trim and write A.csv, B.csv and manifest.toml.
    Linearize(LinearizeArgs),
    /// Fly the ship-landing mission and write the flight log and report.
    Simulate(SimulateArgs),
    /// Validate table CSV files and print their grid coverage.
    TablesCheck(TablesArgs),
}

#[derive(Debug, Args)]
struct VehicleArgs {
    /// Vehicle configuration file (TOML). Built-in UH-60A values if omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Case file with condition defaults (`[condition]` gross_weight_lbf,
    /// altitude_ft, speeds). Flags given on the command line win.
    #[arg(long, value_name = "FILE")]
    case: Option<PathBuf>,
    /// Override a configuration key, e.g. `main_rotor.radius_ft=27`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Gross weight (lbf). Defaults to the configuration value.
    #[arg(long, value_name = "LBF")]
    weight: Option<f64>,
    /// Pressure altitude (ft). Default 5250.
    #[arg(long, value_name = "FT")]
    alt: Option<f64>,
}

#[derive(Debug, Args)]
struct TrimArgs {
    #[command(flatten)]
    vehicle: VehicleArgs,
    /// True airspeed (kts).
    #[arg(long, value_name = "KTS", default_value_t = 0.0)]
    speed: f64,
    /// Flight-path angle, positive climbing (deg).
    #[arg(long, value_name = "DEG", default_value_t = 0.0, allow_negative_numbers = true)]
    climb: f64,
    /// Turn rate, positive right (deg/s).
    #[arg(long, value_name = "DEG_S", default_value_t = 0.0, allow_negative_numbers = true)]
    turn_rate: f64,
    /// Output CSV. Standard output if omitted; a manifest is written next
    /// to the file as `<FILE>.manifest.toml`.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    vehicle: VehicleArgs,
    /// Speeds as start:step:stop in kts, inclusive. Default 0:20:160.
    #[arg(long, value_name = "A:B:C")]
    speeds: Option<String>,
    /// Output CSV. Standard output if omitted.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LinearizeArgs {
    #[command(flatten)]
    vehicle: VehicleArgs,
    /// True airspeed (kts).
    #[arg(long, value_name = "KTS", default_value_t = 0.0)]
    speed: f64,
    /// Output directory.
    #[arg(long, short, value_name = "DIR")]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Vehicle configuration file (TOML).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Mission scenario file (TOML). Built-in ship-landing scenario if omitted.
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Override a key. Keys starting with `scenario.` go to the scenario,
    /// everything else to the vehicle configuration. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory for flight_log.csv and landing_report.toml.
    #[arg(long, short, value_name = "DIR")]
    output: PathBuf,
    /// Also write a plain-text flight-data-recorder file (flight.fdr).
    #[arg(long)]
    fdr: bool,
}

#[derive(Debug, Args)]
struct TablesArgs {
    /// Directory to check. Defaults to $TRAC_TABLES_DIR, then the bundled tables.
    #[arg(long, value_name = "DIR")]
    dir: Option<PathBuf>,
    /// Report file. Standard output if omitted.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

/// Condition defaults read with `--case`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseFile {
    pub condition: CaseCondition,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseCondition {
    pub gross_weight_lbf: Option<f64>,
    pub altitude_ft: Option<f64>,
    /// Sweep speeds, `start:step:stop` in kts.
    pub speeds: Option<String>,
}

impl CaseFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))
    }
}

/// Parses `start:step:stop` (inclusive). The stop value is kept only when
/// it lies on the grid.
pub fn parse_speeds(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("speeds '{spec}' must be start:step:stop with step > 0"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, step, stop] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0 && start >= 0.0 && stop >= start && stop.is_finite()) {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if n > 100_000 {
        return Err(bad());
    }
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// Effective settings echoed into every manifest.
#[derive(Debug, Serialize)]
struct Manifest<'a> {
    run: RunInfo,
    config: &'a ConfigFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<&'a Scenario>,
}

#[derive(Debug, Serialize)]
struct RunInfo {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    speeds_kts: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gross_weight_lbf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    altitude_ft: Option<f64>,
    overrides: Vec<String>,
    tables_dir: String,
}

impl RunInfo {
    fn new(command: &str, overrides: &[String]) -> Self {
        Self {
            command: command.into(),
            speeds_kts: None,
            gross_weight_lbf: None,
            altitude_ft: None,
            overrides: overrides.to_vec(),
            tables_dir: std::env::var(TABLES_DIR_ENV).unwrap_or_else(|_| "built-in".into()),
        }
    }
}

fn manifest_text(m: &Manifest) -> Result<String> {
    toml::to_string(m).map_err(|e| Error::Config(format!("manifest: {e}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(p) => write_file(p, bytes),
        None => std::io::stdout().lock().write_all(bytes).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.toml");
    PathBuf::from(s)
}

/// Vehicle setup shared by trim, sweep and linearize.
struct Setup {
    config: ConfigFile,
    case: CaseFile,
    vehicle: Vehicle,
    weight: f64,
    altitude: f64,
}

impl VehicleArgs {
    fn setup(&self) -> Result<Setup> {
        let config = ConfigFile::load(self.config.as_deref(), &self.overrides)?;
        let case = match &self.case {
            Some(p) => CaseFile::load(p)?,
            None => CaseFile::default(),
        };
        let weight = self
            .weight
            .or(case.condition.gross_weight_lbf)
            .unwrap_or(config.fuselage.gross_weight_lb);
        let altitude = self.alt.or(case.condition.altitude_ft).unwrap_or(DEFAULT_ALTITUDE_FT);
        let vehicle = Vehicle::at_altitude(config.resolve()?, altitude)?;
        Ok(Setup {
            config,
            case,
            vehicle,
            weight,
            altitude,
        })
    }
}

impl Setup {
    fn run_info(&self, command: &str, overrides: &[String]) -> RunInfo {
        RunInfo {
            gross_weight_lbf: Some(self.weight),
            altitude_ft: Some(self.altitude),
            ..RunInfo::new(command, overrides)
        }
    }
}

/// Trimmed state, controls and summary as `quantity,unit,value` rows.
pub fn write_trim_result<W: Write>(t: &TrimResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Numeric(format!("writing trim: {e}"));
    w.write_record(["quantity", "unit", "value"]).map_err(err)?;
    let c = &t.condition;
    let mut rows: Vec<(String, &str, String)> = vec![
        ("airspeed".into(), "kts", format!("{:.8e}", c.airspeed_kts)),
        ("flight_path_angle".into(), "rad", format!("{:.8e}", c.flight_path_angle)),
        ("turn_rate".into(), "rad/s", format!("{:.8e}", c.turn_rate)),
        ("gross_weight".into(), "lbf", format!("{:.8e}", c.gross_weight)),
        ("altitude".into(), "ft", format!("{:.8e}", c.altitude)),
    ];
    for (i, name) in STATE_NAMES.iter().enumerate() {
        rows.push((name.to_string(), STATE_UNITS[i], format!("{:.8e}", t.state[i])));
    }
    for (name, v) in CONTROL_NAMES.iter().zip(t.controls.to_array()) {
        rows.push((format!("{name}_control"), "%", format!("{v:.8e}")));
    }
    rows.push(("power".into(), "hp", format!("{:.8e}", t.power_hp)));
    rows.push(("residual_norm".into(), "-", format!("{:.8e}", t.residual_norm)));
    rows.push(("iterations".into(), "-", t.iterations.to_string()));
    for (q, u, v) in rows {
        w.write_record([q.as_str(), u, v.as_str()]).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Numeric(format!("writing trim: {e}")))
}

fn cmd_trim(a: &TrimArgs) -> Result<()> {
    let s = a.vehicle.setup()?;
    let condition = FlightCondition {
        airspeed_kts: a.speed,
        flight_path_angle: a.climb.to_radians(),
        turn_rate: a.turn_rate.to_radians(),
        gross_weight: s.weight,
        altitude: s.altitude,
    };
    condition.validate()?;
    let t = solve_trim(&condition, &s.vehicle, None, &TrimOptions::default())?;
    let mut buf = Vec::new();
    write_trim_result(&t, &mut buf)?;
    emit(a.output.as_deref(), &buf)?;
    if let Some(out) = &a.output {
        let m = Manifest {
            run: RunInfo {
                speeds_kts: Some(vec![a.speed]),
                ..s.run_info("trim", &a.vehicle.overrides)
            },
            config: &s.config,
            scenario: None,
        };
        write_file(&manifest_path(out), manifest_text(&m)?.as_bytes())?;
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let s = a.vehicle.setup()?;
    let spec = a
        .speeds
        .clone()
        .or_else(|| s.case.condition.speeds.clone())
        .unwrap_or_else(|| DEFAULT_SPEEDS.into());
    let speeds = parse_speeds(&spec)?;
    let template = FlightCondition::level(0.0, s.weight, s.altitude);
    template.validate()?;
    let points = trim_sweep(&speeds, &template, &s.vehicle, &TrimOptions::default())?;
    let mut buf = Vec::new();
    write_sweep_csv(&points, &mut buf)?;
    emit(a.output.as_deref(), &buf)?;
    if let Some(out) = &a.output {
        let m = Manifest {
            run: RunInfo {
                speeds_kts: Some(speeds.clone()),
                ..s.run_info("sweep", &a.vehicle.overrides)
            },
            config: &s.config,
            scenario: None,
        };
        write_file(&manifest_path(out), manifest_text(&m)?.as_bytes())?;
    }
    let failed: Vec<String> = points
        .iter()
        .filter(|p| p.result.is_err())
        .map(|p| format!("{}", p.speed_kts))
        .collect();
    if !failed.is_empty() {
        return Err(Error::Numeric(format!("trim did not converge at [{}] kts", failed.join(", "))));
    }
    Ok(())
}

fn cmd_linearize(a: &LinearizeArgs) -> Result<()> {
    let s = a.vehicle.setup()?;
    let condition = FlightCondition::level(a.speed, s.weight, s.altitude);
    condition.validate()?;
    let t = solve_trim(&condition, &s.vehicle, None, &TrimOptions::default())?;
    let model = linearize(&t, &s.vehicle, &StepRule::default())?;
    let m = Manifest {
        run: RunInfo {
            speeds_kts: Some(vec![a.speed]),
            ..s.run_info("linearize", &a.vehicle.overrides)
        },
        config: &s.config,
        scenario: None,
    };
    model.write_dir(
        &a.output,
        &format!("level flight {} kts", a.speed),
        Some(&manifest_text(&m)?),
    )
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let (scenario_ov, vehicle_ov): (Vec<String>, Vec<String>) =
        a.overrides.iter().cloned().partition(|o| o.trim_start().starts_with("scenario."));
    let scenario_ov: Vec<String> = scenario_ov
        .into_iter()
        .map(|o| o.trim_start()["scenario.".len()..].to_string())
        .collect();
    let config = ConfigFile::load(a.config.as_deref(), &vehicle_ov)?;
    let scenario = Scenario::load(a.scenario.as_deref(), &scenario_ov)?;
    scenario.timing.substeps()?;
    let vehicle = Vehicle::at_altitude(config.resolve()?, scenario.aircraft.altitude_ft)?;
    let mission = Mission::prepare(&scenario, &vehicle)?;
    let run = mission.run();

    create_dir(&a.output)?;
    let mut buf = Vec::new();
    run.log.write_csv(&mut buf)?;
    write_file(&a.output.join("flight_log.csv"), &buf)?;
    if a.fdr {
        let mut buf = Vec::new();
        run.log.write_fdr(&mut buf, (36.9, -76.3))?;
        write_file(&a.output.join("flight.fdr"), &buf)?;
    }
    let m = Manifest {
        run: RunInfo {
            gross_weight_lbf: Some(scenario.aircraft.gross_weight_lbf),
            altitude_ft: Some(scenario.aircraft.altitude_ft),
            ..RunInfo::new("simulate", &a.overrides)
        },
        config: &config,
        scenario: Some(&scenario),
    };
    let report = format!("{}\n{}", run.report_text(), manifest_text(&m)?);
    write_file(&a.output.join("landing_report.toml"), report.as_bytes())?;
    match &run.failure {
        Some(reason) => Err(Error::Mission(reason.clone())),
        None => Ok(()),
    }
}

fn cmd_tables_check(a: &TablesArgs) -> Result<()> {
    let dir = match &a.dir {
        Some(d) => d.clone(),
        None => std::env::var_os(TABLES_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(bundled_dir),
    };
    if !dir.is_dir() {
        return Err(Error::Config(format!("{} is not a directory", dir.display())));
    }
    let open = |name: &str| -> Result<Option<std::fs::File>> {
        let p = dir.join(name);
        if !p.exists() {
            return Ok(None);
        }
        std::fs::File::open(&p).map(Some).map_err(|source| Error::Io { path: p, source })
    };
    let in_file = |name: &str, e: Error| match e {
        Error::Table(msg) => Error::Table(format!("{}: {msg}", dir.join(name).display())),
        other => other,
    };
    let mut out = String::new();
    out.push_str(&format!("directory {}\n", dir.display()));
    for name in [ROTOR_AIRFOIL_FILE, TAIL_AIRFOIL_FILE] {
        match open(name)? {
            None => out.push_str(&format!("{name}: missing, built-in table used\n")),
            Some(f) => {
                let t = AirfoilTable::read_csv(f).map_err(|e| in_file(name, e))?;
                let (al, ma) = (t.alpha_grid(), t.mach_grid());
                out.push_str(&format!(
                    "{name}: ok, {} alpha x {} mach, alpha [{:.8e}, {:.8e}] deg, mach [{:.8e}, {:.8e}]\n",
                    al.len(),
                    ma.len(),
                    al[0].to_degrees(),
                    al[al.len() - 1].to_degrees(),
                    ma[0],
                    ma[ma.len() - 1]
                ));
            }
        }
    }
    match open(INTERFERENCE_FILE)? {
        None => out.push_str(&format!("{INTERFERENCE_FILE}: missing, built-in table used\n")),
        Some(f) => {
            let t = InterferenceTable::read_csv(f).map_err(|e| in_file(INTERFERENCE_FILE, e))?;
            let (c, b) = (t.chi_grid(), t.beta1c_grid());
            out.push_str(&format!(
                "{INTERFERENCE_FILE}: ok, {} skew x {} flap, skew [{:.8e}, {:.8e}] deg, flap [{:.8e}, {:.8e}] deg\n",
                c.len(),
                b.len(),
                c[0].to_degrees(),
                c[c.len() - 1].to_degrees(),
                b[0].to_degrees(),
                b[b.len() - 1].to_degrees()
            ));
        }
    }
    match open(STABILATOR_FILE)? {
        None => out.push_str(&format!("{STABILATOR_FILE}: missing, built-in schedule used\n")),
        Some(f) => {
            let t = StabilatorSchedule::read_csv(f).map_err(|e| in_file(STABILATOR_FILE, e))?;
            let pts: Vec<(f64, f64)> = t.breakpoints().collect();
            out.push_str(&format!(
                "{STABILATOR_FILE}: ok, {} breakpoints, speed [{:.8e}, {:.8e}] kts\n",
                pts.len(),
                pts[0].0,
                pts[pts.len() - 1].0
            ));
        }
    }
    emit(a.output.as_deref(), out.as_bytes())
}

/// Exit code and a short kind label for an error.
pub fn classify(e: &Error) -> (i32, &'static str) {
    match e {
        Error::InvalidArgument(_) => (1, "usage"),
        Error::Config(_) | Error::Table(_) => (2, "config"),
        Error::Io { .. } => (2, "io"),
        Error::Divergence { .. } | Error::Mission(_) => (4, "simulation"),
        Error::Component { inner, .. } => classify(inner),
        _ => (3, "solver"),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn report(code: i32, kind: &str, reason: &str) -> i32 {
    eprintln!("trac: exit={code} kind={kind} reason={}", one_line(reason));
    code
}

/// Runs the command line `argv` (including the program name) and returns
/// the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                _ => {
                    let text = e.to_string();
                    let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
                    report(1, "usage", first)
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Trim(a) => cmd_trim(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Linearize(a) => cmd_linearize(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::TablesCheck(a) => cmd_tables_check(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let (code, kind) = classify(&e);
            report(code, kind, &e.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_ranges() {
        assert_eq!(parse_speeds("0:10:160").unwrap().len(), 17);
        assert_eq!(parse_speeds("0:20:160").unwrap(), vec![0.0, 20.0, 40.0, 60.0, 80.0, 100.0, 120.0, 140.0, 160.0]);
        assert_eq!(parse_speeds("5:10:20").unwrap(), vec![5.0, 15.0]);
        assert_eq!(parse_speeds("0:0.1:0.3").unwrap().len(), 4);
        for bad in ["0:0:10", "10:5:0", "0:10", "a:b:c", "-5:5:10"] {
            assert!(parse_speeds(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn error_classes() {
        assert_eq!(classify(&Error::Config("x".into())).0, 2);
        assert_eq!(classify(&Error::NonConvergence { iterations: 1, residual: 1.0 }).0, 3);
        assert_eq!(classify(&Error::Mission("x".into())).0, 4);
        assert_eq!(classify(&Error::InvalidArgument("x".into()).tagged("fuselage")).0, 1);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_cli(["trac"]), 1);
        assert_eq!(run_cli(["trac", "fly"]), 1);
        assert_eq!(run_cli(["trac", "trim", "--speed", "fast"]), 1);
        assert_eq!(run_cli(["trac", "--help"]), 0);
    }

    #[test]
    fn missing_config_exits_two() {
        assert_eq!(run_cli(["trac", "trim", "--config", "/nonexistent/uh60.toml"]), 2);
    }
}
