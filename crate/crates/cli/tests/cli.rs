use std::path::Path;

use serde_json::Value;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cadist(args: &[&str], budget_mb: Option<&str>) -> Output {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_cadist"));
    cmd.args(args).env_remove(cadist::BUDGET_ENV);
    if let Some(mb) = budget_mb {
        cmd.env(cadist::BUDGET_ENV, mb);
    }
    let out = cmd.output().unwrap();
    Output {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn last_record(stderr: &str) -> Value {
    serde_json::from_str(stderr.lines().last().unwrap()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn csv_artifacts_start_with_a_header_block() {
    let out = cadist(&["hfun", "--structure", "Z", "--n", "3", "--seed", "5"], None);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "# tool: cadist");
    assert!(lines[3].starts_with("# config_digest: ") && lines[3].len() == "# config_digest: ".len() + 64);
    assert_eq!(lines[4], "# seed: 5");
    assert_eq!(lines[5], "# constants: m=6 e=0 c=3 d=6 varsigma=28 D=3");
    assert_eq!(&lines[6..], ["n,h,witness", "0,0,ε", "1,0,ε", "2,0,ε", "3,0,ε"]);
    assert!(out.stderr.contains("h(3) = 0"));
}

#[test]
fn config_values_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"subcommand": "hfun", "structure": "Z-zigzag", "n": 5, "format": "json", "seed": 9}"#)
        .unwrap();
    let out = dir.path().join("a.json");
    let run = cadist(&["hfun", "--config", config.to_str().unwrap(), "--n", "3", "--out", out.to_str().unwrap()], None);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = read_json(&out);
    assert_eq!(doc["header"]["seed"], 9);
    assert_eq!(doc["result"]["structure"], "Z-zigzag-binary");
    assert_eq!(doc["result"]["entries"].as_array().unwrap().len(), 4);

    // The same effective options give the same digest without a config.
    let direct = dir.path().join("b.json");
    let run = cadist(
        &["hfun", "--structure", "Z-zigzag", "--n", "3", "--format", "json", "--seed", "9", "--out", direct.to_str().unwrap()],
        None,
    );
    assert_eq!(run.code, 0);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&direct).unwrap());
}

#[test]
fn config_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"subcommand": "hfun", "structure": "Z", "bogus": 1}"#).unwrap();
    let out = cadist(&["hfun", "--config", config.to_str().unwrap()], None);
    assert_eq!(out.code, 3);
    assert_eq!(last_record(&out.stderr)["status"], "usage_error");

    std::fs::write(&config, r#"{"subcommand": "verify"}"#).unwrap();
    assert_eq!(cadist(&["hfun", "--config", config.to_str().unwrap()], None).code, 3);
    assert_eq!(cadist(&["hfun", "--config", "/nonexistent/run.json"], None).code, 3);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(cadist(&["hfun", "--structure", "nope"], None).code, 3);
    assert_eq!(cadist(&["hfun"], None).code, 3);
    assert_eq!(cadist(&["frobnicate"], None).code, 3);
    assert_eq!(cadist(&["fill", "--structure", "Z2", "--loop", "xy"], None).code, 3);
    assert_eq!(cadist(&["hfun", "--structure", "Z", "--max-words", "0"], None).code, 3);
    assert_eq!(cadist(&["--help"], None).code, 0);
}

#[test]
fn budgets_exit_two() {
    let out = cadist(&["hfun", "--structure", "LL2", "--n", "12", "--max-words", "100"], None);
    assert_eq!(out.code, 2);
    assert_eq!(last_record(&out.stderr)["status"], "budget_exhausted");

    let out = cadist(&["area", "--word", "x x x y y y X X X Y Y Y", "--max-area", "3"], None);
    assert_eq!(out.code, 2);

    let out = cadist(&["hfun", "--structure", "LL2", "--n", "12"], Some("1"));
    assert_eq!(out.code, 2, "{}", out.stderr);
    assert_eq!(cadist(&["hfun", "--structure", "Z"], Some("lots")).code, 3);
}

#[test]
fn verification_failures_exit_one_with_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let export = cadist(&["export", "--structure", "Z-unary", "--out-dir", dir.path().to_str().unwrap()], None);
    assert_eq!(export.code, 0, "{}", export.stderr);
    let manifest = dir.path().join("Z-unary").join("bundle.json");
    assert_eq!(cadist(&["verify", "--bundle", manifest.to_str().unwrap(), "--depth", "6"], None).code, 0);

    // Swap the multipliers of t and T.
    let (m0, m1) = (dir.path().join("Z-unary/multiplier-0.json"), dir.path().join("Z-unary/multiplier-1.json"));
    let (a, b) = (std::fs::read(&m0).unwrap(), std::fs::read(&m1).unwrap());
    std::fs::write(&m0, b).unwrap();
    std::fs::write(&m1, a).unwrap();
    let out = cadist(&["verify", "--bundle", manifest.to_str().unwrap(), "--depth", "6"], None);
    assert_eq!(out.code, 1);
    let record = last_record(&out.stderr);
    assert_eq!(record["status"], "verification_failed");
    assert!(record["failures"][0]["counterexample"].is_string());
}

#[test]
fn out_dir_uses_default_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = cadist(&["dense-loops", "--n", "2", "--out-dir", dir.path().to_str().unwrap()], None);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("lengths 16, 24"));
    let doc = read_json(&dir.path().join("dense.json"));
    assert_eq!(doc["header"]["subcommand"], "dense-loops");
    assert!(doc["header"]["constants"].is_null());
    assert_eq!(doc["result"]["loops"][1]["length"], 24);

    let phi = cadist(&["phi", "--lengths", "3,7", "--upto", "8", "--out", "phi.csv", "--out-dir", dir.path().to_str().unwrap()], None);
    assert_eq!(phi.code, 0);
    let csv = std::fs::read_to_string(dir.path().join("phi.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["n,phi", "0,0", "1,0", "2,0", "3,3", "4,3", "5,3", "6,3", "7,7", "8,7"]);
}

#[test]
fn compare_checks_single_witnesses() {
    let ok = cadist(&["compare", "--g", "identity", "--f", "power:2", "--witness", "1,1,1", "--range", "1000"], None);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    let bad = cadist(&["compare", "--g", "power:2", "--f", "identity", "--witness", "4,4,1", "--range", "1000"], None);
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.contains("\"verdict\": \"refuted\""));
}

#[test]
fn list_names_every_structure() {
    let out = cadist(&["list"], None);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    let names: Vec<&str> = doc["result"]["structures"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 10);
    assert!(names.contains(&"Z-unary") && names.contains(&"LL2-zigzag"));
    assert_eq!(doc["result"]["functions"].as_array().unwrap().len(), 8);
}
