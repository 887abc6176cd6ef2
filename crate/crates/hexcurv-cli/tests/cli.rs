//! End-to-end runs of the `hexcurv` binary.

use hexcurv::conformal::Family;
use hexcurv::mesh::serialize;
use hexcurv::sampling::{self, rng};
use hexcurv::solver::EXISTENCE_NOTE;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/../hexcurv/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexcurv"))
        .args(args)
        .output()
        .expect("spawn hexcurv")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("one JSON document")
}

fn values<'a>(doc: &'a serde_json::Value, key: &str) -> Vec<&'a serde_json::Value> {
    doc["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["key"] == key)
        .map(|r| &r["values"])
        .collect()
}

#[test]
fn validate_fixture() {
    let o = run(&["validate", &fixture("pants.mesh")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("ok, N=3, |E|=3, |F|=2"));
}

#[test]
fn curvature_matches_fixture_target() {
    let o = run(&["curvature", &fixture("pants.mesh")]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 3);
    for (v, line) in lines.iter().enumerate() {
        let tok: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(tok[..2], ["K", &v.to_string()]);
        assert!(
            tok[2].contains('e') && tok[2].split('e').next().unwrap().len() == 18,
            "{line}"
        );
        assert!((tok[2].parse::<f64>().unwrap() - 2.633915793849633).abs() < 1e-12);
    }
}

#[test]
fn jacobian_reports_definiteness() {
    let doc = json(&run(&["--json", "jacobian", &fixture("pants.mesh")]));
    assert_eq!(doc["command"], "jacobian");
    assert_eq!(values(&doc, "L").len(), 9);
    assert_eq!(values(&doc, "negative_definite")[0][0], true);
    assert!(values(&doc, "max_eigenvalue")[0][0].as_f64().unwrap() < 0.0);
}

#[test]
fn regular_hexagon_report() {
    let o = run(&["hexagon", "--lengths", "1.3169579,1.3169579,1.3169579"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "domain D13"), "{text}");
    assert!(text.lines().any(|l| l == "center_class time-like"));
    let angles: Vec<f64> = text
        .lines()
        .find(|l| l.starts_with("angles "))
        .unwrap()
        .split_whitespace()
        .skip(1)
        .map(|t| t.parse().unwrap())
        .collect();
    for a in angles {
        assert!((a - 1.3169579).abs() < 1e-7, "{a}");
    }
}

#[test]
fn json_and_lines_share_records() {
    let args = [
        "hexagon",
        "--lengths",
        "0.7,1.1,2.3",
        "--ratios",
        "2,0.8,0.625",
    ];
    let lines = stdout(&run(&args));
    let doc = json(&run(&[&["--json"], &args[..]].concat()));
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), lines.lines().count());
    for (rec, line) in records.iter().zip(lines.lines()) {
        assert_eq!(line.split_whitespace().next().unwrap(), rec["key"]);
    }
}

#[test]
fn check_identities_passes_and_is_reproducible() {
    let args = [
        "check-identities",
        "--family",
        "A1",
        "--samples",
        "500",
        "--seed",
        "7",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).ends_with("result pass\n"));
    assert_eq!(a.stdout, run(&args).stdout);
}

#[test]
fn solve_round_trip_through_files() {
    let target = scratch("solve.target");
    std::fs::write(&target, "K 0 3\nK 1 4\nK 2 5\n").unwrap();
    let (out, report) = (scratch("solve.f"), scratch("solve.report"));
    let o = run(&[
        "solve",
        &fixture("pants.mesh"),
        target.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&report)
        .unwrap()
        .starts_with("converged true\n"));
    let k = run(&[
        "curvature",
        &fixture("pants.mesh"),
        "--factors",
        out.to_str().unwrap(),
    ]);
    for (line, want) in stdout(&k).lines().zip([3.0, 4.0, 5.0]) {
        let got: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
        assert!((got - want).abs() < 1e-9, "{got} {want}");
    }
}

#[test]
fn unproven_failure_carries_the_note() {
    let mut r = rng(3, 0);
    let tri = sampling::random_mesh(6, &mut r);
    let spec = sampling::random_spec(Family::MixedII, &tri, false, &mut r);
    let mesh = scratch("mixed2.mesh");
    std::fs::write(&mesh, serialize(&tri, &spec)).unwrap();
    let target = scratch("mixed2.target");
    let text: String = tri
        .vertex_ids
        .iter()
        .map(|v| format!("K {v} 40\n"))
        .collect();
    std::fs::write(&target, text).unwrap();
    let o = run(&[
        "--json",
        "solve",
        mesh.to_str().unwrap(),
        target.to_str().unwrap(),
        "--max-iter",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let doc = json(&o);
    assert_eq!(values(&doc, "converged")[0][0], false);
    assert_eq!(values(&doc, "note")[0][0], EXISTENCE_NOTE);
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["validate", "/nonexistent.mesh"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["hexagon", "--lengths", "1,2,3", "--ratios", "1,-0.5,1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["hexagon", "--lengths", "1,2"]).status.code(), Some(2));
    assert_eq!(
        run(&["check-identities", "--family", "B7"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["validate", &fixture("pants.mesh"), "--bogus"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn thread_cap_keeps_output() {
    let args = ["jacobian", &fixture("pants.mesh")];
    let base = run(&args);
    for n in ["0", "1", "3"] {
        let o = Command::new(env!("CARGO_BIN_EXE_hexcurv"))
            .args(args)
            .env("HEXCURV_THREADS", n)
            .output()
            .unwrap();
        assert_eq!(o.stdout, base.stdout);
    }
    let bad = Command::new(env!("CARGO_BIN_EXE_hexcurv"))
        .args(args)
        .env("HEXCURV_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
