mod common;

use std::process::Command;

use common::spec_path;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_orbitscope");

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).env_remove("ORBITSCOPE_CACHE_DIR").output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn spec(name: &str) -> String {
    spec_path(name).to_string_lossy().into_owned()
}

#[test]
fn every_report_echoes_provenance() {
    let d4 = spec("d4");
    let model = "a*J1 + J1^2 + c*J2 + J2^2";
    let cmds: Vec<Vec<&str>> = vec![
        vec!["group", "--spec", &d4],
        vec!["invariants", "--spec", &d4],
        vec!["strata", "--spec", &d4],
        vec!["landau", "--spec", &d4, "--model", model, "--param", "a=-1", "--param", "c=0.5"],
        vec!["reduce", "--spec", &d4, "--model", model, "--critical", "a"],
        vec!["flow", "--spec", &d4, "--model", model, "--param", "a=-1", "--param", "c=0.5", "--t-end", "1"],
    ];
    for mut args in cmds {
        args.extend(["--format", "json", "--seed", "7", "--tol", "1e-7"]);
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{args:?}: {err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        let h = &v["orbitscope"];
        assert_eq!(h["seed"], 7);
        assert_eq!(h["tolerances"]["symmetry"], 1e-7);
        assert_eq!(h["spec_name"], "d4");
        assert_eq!(h["spec_sha256"].as_str().unwrap().len(), 64);
        assert!(h["version"].is_string());
        assert!(h["caps"]["max_order"].is_number());
        assert_eq!(v["command"], args[0]);
    }
}

#[test]
fn text_and_csv_reports_carry_comment_headers() {
    let (_, text, _) = run(&["strata", "--spec", &spec("z2xz2")]);
    assert!(text.starts_with("# orbitscope "));
    assert!(text.contains("# seed: "));
    let (_, csv, _) = run(&["landau", "--spec", &spec("z2"), "--model", "a*J1 + J1^2", "--sweep", "a:-1:1:8", "--format", "csv"]);
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 9);
    // fields are unquoted except the type label
    let fields = |r: &str| r.split('"').enumerate().map(|(i, s)| if i % 2 == 1 { 0 } else { s.matches(',').count() }).sum::<usize>() + 1;
    let width = fields(rows[0]);
    assert_eq!(width, 5);
    assert!(rows.iter().all(|r| fields(r) == width), "{csv}");
}

#[test]
fn failures_are_structured() {
    let (code, _, err) = run(&["group", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"]["module"], "cli");
    assert_eq!(v["error"]["code"], "Io");

    let dir = std::env::temp_dir().join(format!("orbitscope-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("singular.json");
    std::fs::write(&bad, r#"{"dim": 2, "generators": [[["1", "0"], ["0", "0"]]], "name": "bad"}"#).unwrap();
    let (code, _, err) = run(&["group", "--spec", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"]["module"], "group");
    assert_eq!(v["error"]["code"], "NonInvertibleGenerator");

    let (code, _, err) = run(&["landau", "--spec", &spec("z2"), "--model", "a*J1 +* J1^2"]);
    assert_eq!(code, 1, "{err}");
    assert!(serde_json::from_str::<Value>(err.trim()).is_ok());

    let (code, _, err) = run(&["landau", "--sweep", "a:1"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"]["code"], "Usage");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn out_directory_receives_the_report() {
    let dir = std::env::temp_dir().join(format!("orbitscope-out-{}", std::process::id()));
    let (code, out, _) = run(&["invariants", "--spec", &spec("s3"), "--format", "json", "--out", dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(dir.join("invariants.json")).unwrap(), out);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cache_is_transparent() {
    let dir = std::env::temp_dir().join(format!("orbitscope-cache-{}", std::process::id()));
    let args = ["invariants", "--spec", &spec("s4"), "--format", "json"];
    let (_, plain, _) = run(&args);
    for _ in 0..2 {
        let out = Command::new(BIN).args(args).env("ORBITSCOPE_CACHE_DIR", &dir).output().unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), plain);
    }
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
