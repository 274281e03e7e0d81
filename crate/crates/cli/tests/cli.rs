use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hpforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn shipped() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/pg3_q2_four_lines.json")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn shipped_four_lines_verify() {
    let o = run(&["verify", shipped().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("\"higgledy_piggledy\""));
}

#[test]
fn construct_regenerates_shipped_file() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "four.json");
    assert_eq!(run(&["construct", "pg3_four_lines", "--q", "2", "--out", &out]).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(shipped()).unwrap());
}

const CONCURRENT_LINES: &str = r#"{
  "schema": "hpforge/1",
  "field": {"p": 3, "tower": [[0, 1]]},
  "n": 3,
  "k": 1,
  "elements": [
    [[1, 0, 0, 0], [0, 1, 0, 0]],
    [[1, 0, 0, 0], [0, 0, 1, 0]],
    [[1, 0, 0, 0], [0, 0, 0, 1]],
    [[1, 0, 0, 0], [0, 1, 1, 1]]
  ],
  "provenance": null,
  "certificate": null
}"#;

#[test]
fn planted_transversal_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "concurrent.json");
    std::fs::write(&file, CONCURRENT_LINES).unwrap();
    let o = run(&["verify", &file]);
    assert_eq!(o.status.code(), Some(1));
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["verdict"], "not_higgledy_piggledy");
    assert!(cert["witness"]["rows"].is_array());
}

#[test]
fn methods_agree_when_small() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "four5.json");
    assert_eq!(run(&["construct", "pg3_four_lines", "--q", "5", "--out", &out]).status.code(), Some(0));
    let strong = run(&["verify", &out, "--method", "strong"]);
    let transversal = run(&["verify", &out, "--method", "transversal"]);
    assert_eq!(strong.status.code(), Some(0));
    assert_eq!(transversal.status.code(), Some(0));
    let concurrent = path(&dir, "concurrent.json");
    std::fs::write(&concurrent, CONCURRENT_LINES).unwrap();
    let a = run(&["verify", &concurrent, "--method", "strong"]);
    let b = run(&["verify", &concurrent, "--method", "transversal"]);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn eight_planes_file_has_certificate() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "eight.json");
    assert_eq!(run(&["construct", "pg5_eight_planes", "--q", "2", "--out", &out]).status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["elements"].as_array().unwrap().len(), 8);
    assert_eq!(v["k"], 2);
    assert_eq!(v["certificate"]["verdict"], "higgledy_piggledy");
    assert_eq!(v["certificate"]["elapsed_ms"], 0);
    assert_eq!(run(&["verify", &out]).status.code(), Some(0));
}

#[test]
fn bounds_at_five() {
    let o = run(&["codes", "bounds", "--q", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["quantity"] == "m(5,q)" && r["formula"] == "6q+5")
        .unwrap();
    assert_eq!(row["value"], 35.0);
    assert_eq!(row["improves"], true);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["construct", "no_such_thing", "--q", "2"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{\"schema\": \"hpforge/1\"").unwrap();
    assert_eq!(run(&["verify", &bad]).status.code(), Some(2));
    assert_eq!(run(&["verify", &path(&dir, "missing.json")]).status.code(), Some(2));
    assert_eq!(run(&["construct", "pg5_seven_solids", "--q", "5"]).status.code(), Some(2));
}

#[test]
fn seeded_construction_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    let b = path(&dir, "b.json");
    for out in [&a, &b] {
        let o = run(&["construct", "pg4_six_planes", "--q", "2", "--seed", "99", "--out", out]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["provenance"]["seed"], 99);
}

#[test]
fn workers_do_not_change_output() {
    let one = bin().env("HPFORGE_WORKERS", "1").args(["verify", shipped().to_str().unwrap()]).output().unwrap();
    let two = bin().args(["--workers", "2", "verify", shipped().to_str().unwrap()]).output().unwrap();
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(one.status.code(), Some(0));
}

#[test]
fn search_template_round_trip() {
    let dir = TempDir::new().unwrap();
    let template = path(&dir, "t.json");
    std::fs::write(
        &template,
        r#"{
  "schema": "hpforge/1",
  "field": {"p": 2, "tower": [[0, 1]]},
  "n": 4,
  "k": 2,
  "cardinality": 6,
  "constraints": [{"type": "pair_shares", "d": 1}],
  "method": "strong",
  "budget": 100000,
  "seed": 7
}"#,
    )
    .unwrap();
    let out = path(&dir, "found.json");
    assert_eq!(run(&["search", &template, "--out", &out]).status.code(), Some(0));
    assert_eq!(run(&["verify", &out]).status.code(), Some(0));

    let hopeless = path(&dir, "h.json");
    let text = std::fs::read_to_string(&template).unwrap().replace("\"cardinality\": 6", "\"cardinality\": 2");
    std::fs::write(&hopeless, text.replace("100000", "50")).unwrap();
    let o = run(&["search", &hopeless]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("exhausted"));
}

#[test]
fn codes_and_resolving_from_six_lines() {
    let dir = TempDir::new().unwrap();
    let lines = path(&dir, "six.json");
    assert_eq!(run(&["construct", "pg4_six_lines", "--q", "2", "--out", &lines]).status.code(), Some(0));

    let code = path(&dir, "code.json");
    assert_eq!(run(&["codes", "export", &lines, "--out", &code]).status.code(), Some(0));
    let m = run(&["codes", "minimality", &code]);
    assert_eq!(m.status.code(), Some(0));
    assert!(stdout(&m).contains("\"minimal\": true"));

    let r = run(&["codes", "covering-radius", &lines, "--extension", "4"]);
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["covering_radius"], 4);

    let s = run(&["codes", "saturating", &lines, "--embed"]);
    assert_eq!(s.status.code(), Some(0));

    let res = path(&dir, "res.json");
    assert_eq!(run(&["resolve", &lines, "--check", "--out", &res]).status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&res).unwrap()).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 22);
    assert_eq!(v["augmentations"], 0);
}

#[test]
fn report_is_green_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let o = run(&["report", "--q-list", "2,3", "--out-dir", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let ra = std::fs::read_to_string(a.join("results.txt")).unwrap();
    assert!(!ra.contains("FAIL"));
    assert_eq!(ra, std::fs::read_to_string(b.join("results.txt")).unwrap().replace(b.to_str().unwrap(), a.to_str().unwrap()));
    assert_eq!(
        std::fs::read(a.join("q3/pg4_six_lines.json")).unwrap(),
        std::fs::read(b.join("q3/pg4_six_lines.json")).unwrap()
    );
}
