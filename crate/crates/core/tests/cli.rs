use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ico-thermal");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// CSV body as (header, rows of fields).
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn cycle_prints_definite_engine() {
    let o = run(&["cycle", "--beta-eps", "1.39", "--a", "0.6"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mode"], "Engine");
    assert_eq!(v["strokes"].as_array().unwrap().len(), 3);
    assert!(v["first_law_residual"].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"beta_eps": 1.39, "device": "engine-accelerator", "control": "coherent-minus", "a": 0.2, "theta": 1.5707963267948966}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file: Value = serde_json::from_str(&stdout(&run(&["cycle", "--config", cfg]))).unwrap();
    let overridden: Value = serde_json::from_str(&stdout(&run(&["cycle", "--config", cfg, "--a", "0.5"]))).unwrap();
    assert_ne!(from_file["work"], overridden["work"]);
    assert!((overridden["work"].as_f64().unwrap() + 0.5887805926101383).abs() <= 1e-12);
    assert!((overridden["merit"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"beta_eps": 1.0, "a": 0.5, "alpha": 3}"#).unwrap();
    let o = run(&["cycle", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_inputs_exit_two() {
    assert_eq!(
        run(&["cycle", "--beta-eps", "1.39", "--a", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["cycle", "--beta-eps", "-1", "--a", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["cycle", "--a", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    let refrigerator = run(&[
        "cycle",
        "--beta-eps",
        "0.45",
        "--a",
        "0.5",
        "--device",
        "refrigerator",
        "--control",
        "incoherent",
    ]);
    assert_eq!(refrigerator.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_two() {
    let o = run(&[
        "sweep",
        "--beta-eps",
        "1.39",
        "--grid-a",
        "0:1:3",
        "--control",
        "incoherent",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn sweep_rows_and_incoherent_null() {
    let o = run(&[
        "sweep",
        "--beta-eps",
        "1.39",
        "--control",
        "incoherent",
        "--grid-a",
        "0:1:11",
        "--grid-theta",
        "0:3.141592653589793:7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let (header, rows) = parse_csv(&text);
    assert_eq!(header.join(","), ico_thermal::sweep::CSV_HEADER);
    assert_eq!(rows.len(), 77);
    let (a, work) = (column(&header, "a"), column(&header, "work"));
    let centre: Vec<_> = rows.iter().filter(|r| num(&r[a]) == 0.5).collect();
    assert_eq!(centre.len(), 7);
    assert!(centre.iter().all(|r| num(&r[work]).abs() <= 1e-12));
}

#[test]
fn coherent_sweep_has_both_branches() {
    let o = run(&[
        "sweep",
        "--beta-eps",
        "1.39",
        "--control",
        "coherent",
        "--grid-a",
        "0:1:5",
        "--grid-theta",
        "0:3:4",
    ]);
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(rows.len(), 40);
    let br = column(&header, "branch");
    assert_eq!(rows.iter().filter(|r| r[br] == "+").count(), 20);
    assert_eq!(rows.iter().filter(|r| r[br] == "-").count(), 20);
}

#[test]
fn json_format() {
    let o = run(&[
        "sweep",
        "--beta-eps",
        "1.39",
        "--control",
        "coherent-minus",
        "--grid-a",
        "0:1:3",
        "--theta",
        "1.5707963267948966",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!((rows[1]["work"].as_f64().unwrap() + 0.5887805926101383).abs() <= 1e-12);
    assert!((rows[1]["p"].as_f64().unwrap() - 0.375).abs() <= 1e-15);
}

fn figure_rows(name: &str, dir: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let out = dir.join(format!("{name}.csv"));
    let o = run(&["figure", name, "--out", out.to_str().unwrap(), "--emit-plot-script"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let script = std::fs::read_to_string(out.with_extension("gp")).unwrap();
    assert!(script.contains(&format!("{name}.csv")));
    parse_csv(&std::fs::read_to_string(out).unwrap())
}

#[test]
fn figure_presets() {
    let dir = tempfile::tempdir().unwrap();

    let (header, rows) = figure_rows("fig4", dir.path());
    assert_eq!(rows.len(), 201 * 201);
    let p = column(&header, "p");
    let ps: Vec<f64> = rows.iter().map(|r| num(&r[p])).collect();
    assert!((ps.iter().cloned().fold(f64::INFINITY, f64::min) - 0.375).abs() <= 1e-12);
    assert!((ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - 0.5).abs() <= 1e-12);

    let (header, rows) = figure_rows("fig6", dir.path());
    assert_eq!(rows.len(), 2 * 201 * 201);
    let (a, theta, br, work) = (
        column(&header, "a"),
        column(&header, "theta"),
        column(&header, "branch"),
        column(&header, "work"),
    );
    let centre = rows
        .iter()
        .find(|r| num(&r[a]) == 0.5 && (num(&r[theta]) - std::f64::consts::FRAC_PI_2).abs() < 1e-12 && r[br] == "-")
        .unwrap();
    assert!((num(&centre[work]) + 0.5887805926101383).abs() <= 1e-9);

    let (header, rows) = figure_rows("fig8", dir.path());
    let (merit, mode) = (column(&header, "merit"), column(&header, "mode"));
    let cooling: Vec<_> = rows.iter().filter(|r| r[mode] == "Refrigerator").collect();
    assert!(!cooling.is_empty());
    assert!(cooling.iter().all(|r| num(&r[merit]) > 0.0));
    assert!(rows
        .iter()
        .filter(|r| r[mode] != "Refrigerator")
        .all(|r| r[merit].is_empty()));
}

#[test]
fn plot_script_requires_csv_file() {
    assert_eq!(run(&["figure", "fig4", "--emit-plot-script"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_passes() {
    let a = run(&["verify", "--seed", "7", "--n", "1000"]);
    let b = run(&["verify", "--seed", "7", "--n", "1000"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["equations"].as_array().unwrap().len() >= 20);
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for sub in ["cycle", "sweep", "figure", "verify"] {
        assert!(text.contains(sub));
    }
}
