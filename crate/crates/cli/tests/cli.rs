use evasion::model::{Domain, Scenario, SensorTrajectory};
use std::path::Path;
use std::process::{Command, Output};

fn evasion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evasion"))
        .args(args)
        .env_remove("EVASION_FIXTURES")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn zigzag_certifies_teleporting_hole() {
    let v = json(&evasion(&["zigzag", "--fixture", "hole_teleports"]));
    assert_eq!(v["verdict"], "no_evasion_certified");
}

#[test]
fn simulate_then_zigzag_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("stream.json");
    let out = evasion(&["simulate", "--fixture", "sweep_half", "-o", stream.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&evasion(&["zigzag", stream.to_str().unwrap()]));
    assert_eq!(v["verdict"], "evasion_possible");
    let d = json(&evasion(&["dsg", stream.to_str().unwrap()]));
    assert_eq!(d["verdict"], "inconclusive");
}

#[test]
fn report_is_byte_identical_across_runs() {
    let args = ["report", "--fixture", "hole_drifts", "--no-timings"];
    let a = evasion(&args);
    let b = evasion(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.get("timings").is_none());
    assert_eq!(v["verdicts"]["oracle"]["verdict"], "evasion");
}

#[test]
fn exit_codes_follow_error_class() {
    assert_eq!(evasion(&["zigzag", "/definitely/missing.json"]).status.code(), Some(1));
    assert_eq!(evasion(&["zigzag", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(evasion(&["zigzag", "--fixture", "no_such_fixture"]).status.code(), Some(3));
    assert_eq!(evasion(&["zigzag", "--fixture", "hole_drifts", "--field", "4"]).status.code(), Some(3));
    assert_eq!(evasion(&["evade", "--fixture", "island_behind_full_sweep"]).status.code(), Some(6));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"domain":{"kind":"rect","params":[0,0,1,1]},"sensor_radius":-1,"sensors":[]}"#).unwrap();
    let code = evasion(&["oracle", bad.to_str().unwrap()]).status.code();
    assert!(matches!(code, Some(3) | Some(4)), "{code:?}");
}

#[test]
fn oracle_refusal_to_converge_is_code_seven() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("ring.json");
    std::fs::write(&s, closing_ring()).unwrap();
    let coarse = ["oracle", s.to_str().unwrap(), "--grid-h", "0.04", "--grid-dt", "0.3333333333333333"];
    assert_eq!(json(&evasion(&coarse))["verdict"], "evasion");
    let mut refine = coarse.to_vec();
    refine.extend(["--refine", "1"]);
    assert_eq!(evasion(&refine).status.code(), Some(7));
}

fn closing_ring() -> String {
    let sensor = |i: usize| {
        let a = std::f64::consts::FRAC_PI_2 + i as f64 * 2.0 * std::f64::consts::PI / 3.0;
        let at = |rad: f64| [rad * a.cos(), rad * a.sin()];
        let (p, q) = (at(1.19), at(0.99));
        SensorTrajectory::moving(format!("s{i}"), vec![[0.0, p[0], p[1]], [0.5, q[0], q[1]], [1.0, p[0], p[1]]])
    };
    Scenario::new(Domain::disk(0.0, 0.0, 0.3), 1.0, (0..3).map(sensor).collect()).unwrap().to_json()
}

#[test]
fn fixture_directory_overrides_built_ins() {
    let dir = tempfile::tempdir().unwrap();
    let hole = json(&evasion(&["report", "--fixture", "static_hole", "--no-oracle", "--no-timings"]));
    let covered = fixture_json("static_covered");
    std::fs::write(dir.path().join("static_hole.json"), covered).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_evasion"))
        .args(["report", "--fixture", "static_hole", "--no-oracle", "--no-timings"])
        .env("EVASION_FIXTURES", dir.path())
        .output()
        .unwrap();
    let swapped = json(&out);
    assert_ne!(hole["scenario"]["sha256"], swapped["scenario"]["sha256"]);
    assert_eq!(swapped["verdicts"]["zigzag"]["verdict"], "no_evasion_certified");
}

fn fixture_json(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn render_formats() {
    let out = evasion(&["render", "--fixture", "hole_drifts", "--format", "svg"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("<svg"));
    let out = evasion(&["render", "--fixture", "hole_drifts", "--what", "slice", "--at", "0.5", "--format", "svg"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("<polygon"));
    let out = evasion(&["render", "--fixture", "hole_drifts", "--what", "reeb", "--format", "dot"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("digraph"));
    assert_eq!(evasion(&["render", "--fixture", "hole_drifts", "--what", "reeb", "--format", "svg"]).status.code(), Some(2));
}

#[test]
fn help_documents_exit_codes() {
    let out = evasion(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Exit codes") && text.contains("EVASION_FIXTURES"));
}

#[test]
fn full_suite_report_has_no_violations() {
    let out = evasion(&["report", "--all-fixtures", "--no-timings"]);
    let table = String::from_utf8(out.stderr.clone()).unwrap();
    let v = json(&out);
    assert!(table.contains("violations: 0"), "{table}");
    assert!(v.as_object().unwrap().len() >= 16);
}
