use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use nsaspec_cli::{parse_spec, CliError};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nsaspec"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    v
}

const PATHOL4: &str = r#"{"kind":"catalog","name":"pathol","params":{"n":4}}"#;
const TWODIM: &str = r#"{"kind":"catalog","name":"twodim","params":{"s":1,"t":1}}"#;

#[test]
fn spec_examples() {
    let spec = parse_spec(TWODIM).unwrap();
    assert!(spec.first_order().is_some());

    let singular = r#"{"kind":"first_order","breakpoints":[0,3.14159],
        "matrices":[[[[1,0],[2,0]],[[0.5,0],[1,0]]]],
        "S":[[1,0],[0,0]],"T":[[0,0],[1,0]]}"#;
    match parse_spec(singular) {
        Err(CliError::Validation(m)) => assert!(m.contains("A_1 not invertible"), "{m}"),
        other => panic!("{other:?}"),
    }

    let raw = r#"{"kind":"raw_expsum","terms":[{"mu":[0,1],"delta":[1,0]},{"mu":[0,-1],"delta":[-1,0]}]}"#;
    let f = parse_spec(raw).unwrap().char_function().unwrap();
    let z = num_complex::Complex64::new(0.4, -0.3);
    let expected = num_complex::Complex64::new(0.0, 2.0) * z.sin();
    assert!((f.eval(z).unwrap() - expected).norm() < 1e-14);

    match parse_spec("{\n\"kind\": \"catalog\",\n\"name\": }") {
        Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    match parse_spec(r#"{"kind":"catalog","name":"nope"}"#) {
        Err(CliError::Validation(m)) => assert!(m.contains("nope")),
        other => panic!("{other:?}"),
    }
    match parse_spec(r#"{"kind":"first_order","breakpoints":[0,1],"matrices":[[[1]]],"S":[[1]]}"#) {
        Err(CliError::Validation(m)) => assert!(m.starts_with("T:"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn analyze_pathol_perimeter() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "p.json", PATHOL4);
    let v = json(&run(&["analyze", "--spec", spec.to_str().unwrap()]));
    let b = v["b_K"].as_f64().unwrap();
    assert!((b - 4.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    assert_eq!(v["generic"], true);
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn analyze_reports_whole_plane() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        dir.path(),
        "w.json",
        r#"{"kind":"catalog","name":"periodic","params":{
            "A1":[[[1,0.5],[0.2,0]],[[0,0],[-0.7,1]]],
            "A2":[[[-1,-0.5],[-0.2,0]],[[0,0],[0.7,-1]]]}}"#,
    );
    let v = json(&run(&["analyze", "--spec", spec.to_str().unwrap()]));
    assert_eq!(v["spectrum"], "whole_plane");
}

#[test]
fn count_twodim_table() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "t.json", TWODIM);
    let o = run(&[
        "count",
        "--spec",
        spec.to_str().unwrap(),
        "--emax",
        "20",
        "--steps",
        "4",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("e,n,predicted,difference"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let e = r[0];
        assert_eq!(r[1], 2.0 * (e / 2.0).floor() + 1.0);
        assert!(r[3].abs() <= 2.0);
    }
}

#[test]
fn eigs_is_reproducible_across_threads() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "p.json", PATHOL4);
    let args = ["eigs", "--spec", spec.to_str().unwrap(), "--radius", "25"];
    let outs: Vec<Vec<u8>> = ["1", "4", "4"]
        .iter()
        .map(|t| {
            let o = bin().args(args).env("NSASPEC_THREADS", t).output().unwrap();
            assert!(o.status.success());
            o.stdout
        })
        .collect();
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(outs[0].clone()).unwrap();
    assert!(text.starts_with("re,im,multiplicity,residual\n"));
    assert!(text.lines().count() > 20);

    let bad = bin()
        .args(args)
        .env("NSASPEC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn eigs_rect_finds_twodim_zeros() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "t.json", TWODIM);
    let v = json(&run(&[
        "eigs",
        "--spec",
        spec.to_str().unwrap(),
        "--rect",
        "-5,5,-1,1",
        "--format",
        "json",
    ]));
    let re: Vec<f64> = v["zeros"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| z["re"].as_f64().unwrap())
        .collect();
    assert_eq!(re.len(), 5);
    for (x, k) in re.iter().zip([-4.0, -2.0, 0.0, 2.0, 4.0]) {
        assert!((x - k).abs() < 1e-8);
    }
}

#[test]
fn grid_row_count() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "t.json", TWODIM);
    let o = run(&[
        "grid",
        "--spec",
        spec.to_str().unwrap(),
        "--rect",
        "-3,3,-2,2",
        "--res",
        "7,5",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7 * 5 + 1);
    assert_eq!(text.lines().next(), Some("x,y,log10_abs_f"));
}

#[test]
fn reconstruct_from_written_artifacts() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "p.json", PATHOL4);
    let csv = dir.path().join("zeros.csv");
    let js = dir.path().join("zeros.json");
    let s = spec.to_str().unwrap();
    assert!(run(&[
        "eigs",
        "--spec",
        s,
        "--radius",
        "80",
        "-o",
        csv.to_str().unwrap()
    ])
    .status
    .success());
    assert!(run(&[
        "eigs",
        "--spec",
        s,
        "--radius",
        "80",
        "--format",
        "json",
        "-o",
        js.to_str().unwrap()
    ])
    .status
    .success());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
    for input in [&csv, &js] {
        let v = json(&run(&[
            "reconstruct",
            "--input",
            input.to_str().unwrap(),
            "--rmin",
            "30",
        ]));
        assert_eq!(v["edges"].as_array().unwrap().len(), 4);
        let p = v["perimeter"].as_f64().unwrap();
        assert!((p / (4.0 * std::f64::consts::SQRT_2) - 1.0).abs() < 0.02);
    }
}

#[test]
fn projnorms_twodim() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "t.json", TWODIM);
    let v = json(&run(&[
        "projnorms",
        "--spec",
        spec.to_str().unwrap(),
        "--indices",
        "0,1",
    ]));
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    let z0 = reports[0]["z"][0].as_f64().unwrap();
    assert!(z0.abs() < 1e-8);
    let z1 = reports[1]["z"][0].as_f64().unwrap();
    assert!((z1.abs() - 2.0).abs() < 1e-8);
    for r in reports {
        assert!(r["proj_norm"].as_f64().unwrap() >= 1.0 - 1e-12);
    }
}

#[test]
fn probe_rhombus_boundary_term() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        dir.path(),
        "r.json",
        r#"{"kind":"catalog","name":"rhombus","params":{"alpha":0.5235987755982988,"theta":0.7853981633974483}}"#,
    );
    let v = json(&run(&[
        "probe",
        "--spec",
        spec.to_str().unwrap(),
        "--n",
        "1000",
    ]));
    let b = &v["boundary_term"];
    let expected = 2.0 / 3.0 * 10.0 * (std::f64::consts::PI / 3.0).sin();
    assert!(b[0].as_f64().unwrap().abs() < 1e-12);
    assert!((b[1].as_f64().unwrap() - expected).abs() < 1e-9);

    let other = write(dir.path(), "t.json", TWODIM);
    let o = run(&["probe", "--spec", other.to_str().unwrap(), "--n", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes_and_json_errors() {
    let dir = TempDir::new().unwrap();
    let broken = write(dir.path(), "b.json", "{\"kind\": ");
    let o = run(&[
        "--json-errors",
        "analyze",
        "--spec",
        broken.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["schema_version"], 1);
    assert_eq!(err["error"]["kind"], "parse");
    assert!(err["error"]["line"].is_u64());

    let single = write(
        dir.path(),
        "s.json",
        r#"{"kind":"raw_expsum","terms":[{"mu":[1,0],"delta":[1,0]}]}"#,
    );
    let o = run(&[
        "--json-errors",
        "count",
        "--spec",
        single.to_str().unwrap(),
        "--emax",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numerical");

    let o = run(&["eigs", "--spec", single.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "analyze",
        "--spec",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn selftest_prints_every_criterion() {
    let o = run(&["selftest"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    assert!(lines
        .iter()
        .all(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")));
    let any_fail = lines.iter().any(|l| l.starts_with("[FAIL]"));
    assert_eq!(o.status.code(), Some(if any_fail { 3 } else { 0 }));
}
