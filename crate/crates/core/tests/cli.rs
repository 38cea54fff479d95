use std::path::Path;
use std::process::{Command, Output};

use trac::vehicle::ConfigFile;

fn trac(args: &[&str], tables_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_trac"));
    cmd.args(args).env_remove("TRAC_TABLES_DIR");
    if let Some(d) = tables_dir {
        cmd.env("TRAC_TABLES_DIR", d);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_exit(o: &Output, code: i32, kind: &str) {
    let err = stderr(o);
    assert_eq!(o.status.code(), Some(code), "{err}");
    assert!(err.starts_with(&format!("trac: exit={code} kind={kind} reason=")), "{err}");
    assert_eq!(err.lines().count(), 1, "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_exit(&trac(&["trim", "--bogus"], None), 1, "usage");
    assert_exit(&trac(&["sweep", "--speeds", "0:0:10"], None), 1, "usage");
    assert_exit(&trac(&["fly"], None), 1, "usage");
}

#[test]
fn missing_config_exits_two_and_names_the_file() {
    let o = trac(&["trim", "--config", "/nonexistent/uh60.toml"], None);
    assert_exit(&o, 2, "io");
    assert!(stderr(&o).contains("/nonexistent/uh60.toml"));
    assert_exit(&trac(&["trim", "--override", "fuselage.no_such_key=1"], None), 2, "config");
}

#[test]
fn unreachable_trim_exits_three() {
    assert_exit(&trac(&["trim", "--speed", "400"], None), 3, "solver");
}

#[test]
fn bad_approach_geometry_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let o = trac(
        &["simulate", "--override", "scenario.helicopter.position_m=[0,0,10]", "-o", out.to_str().unwrap()],
        None,
    );
    assert_exit(&o, 2, "config");
}

#[test]
fn failed_mission_exits_four_and_keeps_the_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    // a stick that barely moves cannot follow the approach
    let o = trac(
        &[
            "simulate",
            "--override",
            "scenario.timing.slew_limit_pct_per_s=0.001",
            "-o",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_exit(&o, 4, "simulation");
    assert!(out.join("flight_log.csv").is_file());
    let report: toml::Value = std::fs::read_to_string(out.join("landing_report.toml")).unwrap().parse().unwrap();
    assert_eq!(report["status"].as_str(), Some("failed"));
    assert!(report["reason"].as_str().unwrap().contains("deck"));
}

#[test]
fn overrides_are_recorded_in_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hover.csv");
    let ov = "fuselage.gross_weight_lb=16500";
    let o = trac(&["trim", "--override", ov, "-o", out.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));

    let manifest: toml::Value = std::fs::read_to_string(dir.path().join("hover.csv.manifest.toml"))
        .unwrap()
        .parse()
        .unwrap();
    let listed: Vec<&str> = manifest["run"]["overrides"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(listed, [ov]);
    assert_eq!(manifest["run"]["gross_weight_lbf"].as_float(), Some(16_500.0));
    let recorded: ConfigFile = manifest["config"].clone().try_into().unwrap();
    assert_eq!(recorded, ConfigFile::load(None, &[ov.to_string()]).unwrap());
}

#[test]
fn tables_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = trac(&["tables-check"], Some(dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains(&dir.path().display().to_string()));
    assert_eq!(text.matches("missing, built-in").count(), 4);

    let bundled = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let o = trac(&["tables-check"], Some(Path::new(bundled)));
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8(o.stdout).unwrap().matches(": ok,").count(), 4);

    std::fs::write(dir.path().join("rotor_airfoil.csv"), "alpha_deg,mach,cl\n1,2\n").unwrap();
    let o = trac(&["tables-check"], Some(dir.path()));
    assert_exit(&o, 2, "config");
    assert!(stderr(&o).contains("rotor_airfoil.csv"));
}

#[test]
fn help_lists_every_flag() {
    let cases: [(&str, &[&str]); 5] = [
        ("trim", &["--config", "--case", "--override", "--weight", "--alt", "--speed", "--climb", "--turn-rate", "--output"]),
        ("sweep", &["--config", "--case", "--override", "--weight", "--alt", "--speeds", "--output"]),
        ("linearize", &["--config", "--case", "--override", "--weight", "--alt", "--speed", "--output"]),
        ("simulate", &["--config", "--scenario", "--override", "--output", "--fdr"]),
        ("tables-check", &["--dir", "--output"]),
    ];
    for (cmd, flags) in cases {
        let o = trac(&[cmd, "--help"], None);
        assert_eq!(o.status.code(), Some(0));
        let text = String::from_utf8(o.stdout).unwrap();
        for f in flags {
            assert!(text.contains(f), "{cmd} --help does not mention {f}");
        }
    }
    let top = String::from_utf8(trac(&["--help"], None).stdout).unwrap();
    for cmd in ["trim", "sweep", "linearize", "simulate", "tables-check"] {
        assert!(top.contains(cmd));
    }
}
