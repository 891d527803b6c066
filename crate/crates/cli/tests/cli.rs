use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stokes-perturb"));
    for (k, _) in std::env::vars() {
        if k.starts_with("STOKES_PERTURB_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shapes_then_laplace_solve() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["shapes", "--shape", "square", "--n", "8", "--out", ".", "--name", "sq.mask"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(d, &["solve", "--operator", "laplace", "--mode", "weak", "--domain-file", "sq.mask", "--rhs", "constant", "--out", "res"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.join("res/solution.csv").exists());
    let stats = json(&d.join("res/stats.json"));
    assert_eq!(stats["operator"], "scalar_laplace");
    assert!(stats["solution_norm"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_mode_names_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["solve", "--mode", "strong"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--mode"));
}

#[test]
fn environment_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().current_dir(dir.path()).env("STOKES_PERTURB_MODE", "bogus").args(["solve"]).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = bin()
        .current_dir(dir.path())
        .env("STOKES_PERTURB_OUT", "envout")
        .env("STOKES_PERTURB_N", "6")
        .args(["shapes", "--shape", "disk"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(dir.path().join("envout/domain.mask")).unwrap().starts_with("nx 6\n"));
}

#[test]
fn stokes_oracle_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["shapes", "--shape", "slit-square", "--n", "16", "--out", "."])), 0);
    let o = run(d, &["solve", "--operator", "stokes", "--domain-file", "domain.mask", "--rhs", "crossflow", "--oracle", "--dump-matrix", "--out", "s"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stats = json(&d.join("s/stats.json"));
    assert!(stats["oracle_agreement"].as_f64().unwrap() <= 1e-6);
    assert!(d.join("s/pressure.csv").exists());
    let matrix = fs::read_to_string(d.join("s/matrix.txt")).unwrap();
    assert!(matrix.lines().count() > 100);
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a", "b"] {
        assert_eq!(code(&run(d, &["solve", "--operator", "stokes", "--n", "12", "--out", out])), 0);
    }
    for f in ["solution.csv", "pressure.csv", "stats.json"] {
        assert_eq!(fs::read(d.join("a").join(f)).unwrap(), fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn project_gradient_gives_zero_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["project", "--n", "12", "--input", "gradient", "--mode", "pseudo", "--out", "g"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&d.join("g/summary.json"));
    assert!(s["solenoidal_norm"].as_f64().unwrap() <= 1e-10 * s["input_norm"].as_f64().unwrap());

    assert_eq!(code(&run(d, &["shapes", "--shape", "slit-square", "--n", "12", "--out", "."])), 0);
    let o = run(d, &["project", "--domain-file", "domain.mask", "--input", "vortex", "--gap-samples", "3", "--seed", "5", "--out", "p1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let first = json(&d.join("p1/summary.json"));
    assert!(first["output_is_solenoidal"].as_bool().unwrap());
    assert!(first["subspace_gap"].as_f64().unwrap() > 0.0);
    let o = run(d, &["project", "--domain-file", "domain.mask", "--field", "p1/solenoidal.csv", "--out", "p2"]);
    assert_eq!(code(&o), 0);
    let second = json(&d.join("p2/summary.json"));
    assert!(second["input_is_solenoidal"].as_bool().unwrap());
    assert!(second["gradient_norm"].as_f64().unwrap() <= 1e-9 * second["input_norm"].as_f64().unwrap());
}

#[test]
fn bad_field_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.csv"), "kind,axis,i,j,value\nface,z,0,0,1\n").unwrap();
    let o = run(d, &["project", "--n", "4", "--field", "bad.csv"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.csv:2"));
    assert_eq!(code(&run(d, &["project", "--n", "4", "--field", "missing.csv"])), 2);
}

#[test]
fn dump_summarizes_and_renders() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["solve", "--n", "8", "--out", "."])), 0);
    let o = run(d, &["dump", "--field", "solution.csv", "--n", "8", "--out", "."]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["kind"], "face");
    assert!(s["is_solenoidal"].as_bool().unwrap());
    assert!(fs::read_to_string(d.join("solution.svg")).unwrap().starts_with("<svg"));
}

fn write_config(d: &Path, body: &str) {
    fs::write(d.join("exp.json"), body).unwrap();
}

#[test]
fn constant_family_sequence_has_zero_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_config(
        d,
        r#"{"schema_version": 1, "experiment": {"kind": "sequence", "operator": "scalar_laplace",
            "direction": "increasing", "mode": "both",
            "domain": {"style": "fixed_grid", "n": 8, "family": {"family": "constant", "mask": {"from": "square"}, "levels": 3}},
            "forcing": {"type": "constant", "value": [1, 0]}}}"#,
    );
    let o = run(d, &["sequence", "--config", "exp.json", "--out", "r", "--threads", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.join("r/report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,h,dofs,error_l2,rate,iters,residual,seconds"));
    for l in lines {
        assert_eq!(l.split(',').nth(3), Some("0"), "{l}");
    }
    assert!(d.join("r/report_pseudo.csv").exists());
    assert!(fs::read_to_string(d.join("r/report.svg")).unwrap().contains("<polyline"));
}

#[test]
fn discrimination_sequence_reports_delta() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_config(
        d,
        r#"{"schema_version": 1, "experiment": {"kind": "discrimination", "n": 16, "thicknesses": [1, 0],
            "forcing": {"type": "crossflow", "from": 0.25, "to": 0.75}}}"#,
    );
    let o = run(d, &["sequence", "--config", "exp.json", "--out", "r"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&d.join("r/summary.json"));
    assert!(s["delta"].as_f64().unwrap() > 0.0);
    assert!(fs::read_to_string(d.join("r/report.svg")).unwrap().contains("delta"));
}

#[test]
fn failing_assertion_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // eroded squares never reach the limit, so the final error stays far above 1e-8
    write_config(
        d,
        r#"{"schema_version": 1, "experiment": {"kind": "sequence", "operator": "scalar_laplace",
            "direction": "increasing",
            "domain": {"style": "fixed_grid", "n": 16, "family": {"family": "erosion", "base": {"from": "square"}, "offsets": [3, 2, 1]}},
            "forcing": {"type": "constant", "value": [1, 0]}}}"#,
    );
    assert_eq!(code(&run(d, &["sequence", "--config", "exp.json", "--out", "r"])), 1);
}

#[test]
fn malformed_or_unknown_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_config(d, "{ not json");
    assert_eq!(code(&run(d, &["sequence", "--config", "exp.json"])), 2);
    write_config(d, r#"{"schema_version": 1, "surprise": true}"#);
    assert_eq!(code(&run(d, &["sequence", "--config", "exp.json"])), 2);
    write_config(d, r#"{"schema_version": 7}"#);
    let o = run(d, &["solve", "--config", "exp.json"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema_version"));
    assert_eq!(code(&run(d, &["sequence"])), 2);
}
