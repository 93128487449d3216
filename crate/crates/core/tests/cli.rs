use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_potentiality"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn potentiality")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn bell_check_vessels_table() {
    let v = json(&run(&["bell-check", &data("vessels_ideal.json"), "--format", "json"]));
    assert_eq!(v["bell_quantity"], 4);
    assert_eq!(v["bell_verdict"]["status"], "violated");
    assert_eq!(v["kolmogorov"]["verdict"], "nonclassical");
    assert_eq!(v["classicality"]["witness"]["value"], 4);
}

#[test]
fn bell_check_point_mass() {
    let v = json(&run(&["bell-check", &data("atom_point_mass.json"), "--format", "json"]));
    assert_eq!(v["bell_quantity"], 2);
    assert_eq!(v["bell_verdict"]["status"], "satisfied");
    assert_eq!(v["kolmogorov"]["verdict"], "classical");
    assert_eq!(v["kolmogorov"]["weights"], serde_json::json!({"+--+": 1}));
}

#[test]
fn bell_check_rejects_negative_probability() {
    let o = run(&["bell-check", &data("negative_entry.json")]);
    assert_eq!(o.status.code(), Some(4));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("13.p_uu"));
}

#[test]
fn bell_check_reports_parse_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"pairs\": {\n  \"13\": [}\n").unwrap();
    let o = run(&["bell-check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn simulate_is_byte_identical() {
    let a = run(&["simulate", "vessels", "--trials", "1000", "--seed", "7", "--format", "json"]);
    let b = run(&["simulate", "vessels", "--trials", "1000", "--seed", "7", "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_single_trial() {
    let v = json(&run(&["simulate", "soccer", "--trials", "1", "--seed", "1", "--format", "json"]));
    assert_eq!(v["trials"], 1);
    for pair in ["13", "14", "23", "24"] {
        let c = &v["counts"][pair];
        let total: u64 = ["uu", "ud", "du", "dd"].iter().map(|k| c[k].as_u64().unwrap()).sum();
        assert_eq!(total, 1, "pair {pair}");
    }
}

#[test]
fn simulate_csv_has_four_rows() {
    let o = run(&["simulate", "vessels", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "pair,p_uu,p_ud,p_du,p_dd,E");
    assert_eq!(lines.len(), 5);
}

#[test]
fn simulate_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("turbid.json");
    std::fs::write(&cfg, r#"{"transparent": false}"#).unwrap();
    let v =
        json(&run(&["simulate", "vessels", "--config", cfg.to_str().unwrap(), "--trials", "200", "--format", "json"]));
    assert_eq!(v["config"]["transparent"], false);
    let e = &v["correlations"];
    assert_eq!([&e["e13"], &e["e14"], &e["e23"], &e["e24"]], [-1, -1, -1, 1]);

    std::fs::write(&cfg, r#"{"threshold": 30}"#).unwrap();
    let o = run(&["simulate", "vessels", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    std::fs::write(&cfg, r#"{"volume": 30}"#).unwrap();
    let o = run(&["simulate", "vessels", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["simulate", "soccer", "--trials", "10", "--format", "json", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(written["entity"], "soccer");
}

fn cycle(args: &[&str]) -> Vec<String> {
    let v = json(&run(&[args, &["--format", "json"]].concat()));
    v["cycle"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[test]
fn liar_cycles() {
    assert_eq!(cycle(&["liar", "--variant", "A", "--start", "1:true", "--steps", "4"]), ["1T", "2F", "1F", "2T", "1T"]);
    assert_eq!(cycle(&["liar", "--variant", "C", "--start", "1:true", "--steps", "2"]), ["TF", "FT", "TF"]);
    assert_eq!(cycle(&["liar", "--variant", "B", "--start", "1:false", "--steps", "3"]), ["FF", "FF", "FF", "FF"]);
}

#[test]
fn liar_dump_state() {
    let v = json(&run(&["liar", "--variant", "A", "--steps", "1", "--dump-state", "--format", "json"]));
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 2);
    assert_eq!(states[0]["state"].as_array().unwrap().len(), 16);
}

#[test]
fn liar_invalid_inputs() {
    let o = run(&["liar", "--variant", "A", "--step-time", "0"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["liar", "--variant", "A", "--start", "3:true"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn polytope_listing_and_tests() {
    let v = json(&run(&["polytope", "--format", "json"]));
    let verts = v["vertices"].as_array().unwrap();
    assert_eq!(verts.len(), 8);
    for vert in verts {
        let p: i64 = vert["components"].as_array().unwrap().iter().map(|c| c.as_i64().unwrap()).product();
        assert_eq!(p, 1);
    }

    let v = json(&run(&["polytope", "--test", "-1,1,1,1", "--format", "json"]));
    assert_eq!(v["test"]["classicality"]["verdict"], "nonclassical");
    assert_eq!(v["test"]["classicality"]["witness"]["value"], 4);

    let v = json(&run(&["polytope", "--test", "1,1,1,1", "--format", "json"]));
    assert_eq!(v["test"]["classicality"]["weights"], serde_json::json!({"(1,1,1,1)": 1}));

    let o = run(&["polytope", "--test", "1,1,banana,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "vessels", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
