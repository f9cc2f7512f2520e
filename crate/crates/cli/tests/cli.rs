//! End-to-end tests of the `mortal` binary: flags, formats, exit codes, and
//! the results catalog.

use std::path::Path;
use std::process::{Command, Output};

fn mortal() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mortal"))
}

fn run(args: &[&str]) -> Output {
    mortal().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn shortest_fibonacci_pair_gf2() {
    let out = run(&["shortest", "--q", "2", "--gen", "1,0;0,0", "--gen", "1,1;1,0", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["mortal"], true);
    assert_eq!(v["shortest_length"], 4);
    assert_eq!(v["witness"], serde_json::json!([0, 1, 1, 0]));
    assert_eq!(v["semigroup_size"], 13);
    assert_eq!(v["minimal_word_count"], serde_json::Value::Null);
    assert_eq!(v["truncated"], false);
}

#[test]
fn shortest_identity_only_is_immortal() {
    let out = run(&["shortest", "--q", "7", "--gen", "1,0;0,1", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["mortal"], false);
    assert_eq!(v["shortest_length"], serde_json::Value::Null);
    assert_eq!(v["witness"], serde_json::Value::Null);
    assert_eq!(v["semigroup_size"], 1);
}

#[test]
fn shortest_zero_generator() {
    let out = run(&["shortest", "--q", "2", "--gen", "0,0;0,0", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["shortest_length"], 1);
    assert_eq!(v["witness"], serde_json::json!([0]));
}

#[test]
fn parse_errors_name_token_and_position() {
    let out = run(&["shortest", "--q", "2", "--gen", "1,0;0,x"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 2, entry 2"), "{err}");
    assert!(err.contains("'x'"), "{err}");

    let out = run(&["shortest", "--q", "2", "--gen", "1,0;0,5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));

    // No generators at all is a usage error too.
    let out = run(&["shortest", "--q", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_examples_and_range() {
    let out = run(&["construct", "--min-length", "5", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["p"], 11);
    assert_eq!(v["shortest_length"], 11);

    let out = run(&["construct", "--min-length", "1", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["p"], 2);
    assert_eq!(v["shortest_length"], 4);

    let out = run(&["construct", "--min-length", "93"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_emit_roundtrips_through_shortest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    let out = run(&["construct", "--min-length", "5", "--emit", path.to_str().unwrap(), "--json"]);
    let bundle = stdout_json(&out);

    let out = run(&["shortest", "--generators", path.to_str().unwrap(), "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["shortest_length"], bundle["shortest_length"]);
    assert_eq!(v["mortal"], true);
}

#[test]
fn rys_all_mode_gf2() {
    let out = run(&["rys", "--n", "2", "--q", "2", "--k-max", "all", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["value"], 4);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["k_max"], "all");
    assert_eq!(v["sets_examined"], 65535);
    assert!(v.get("elapsed_ms").is_none(), "volatile keys stay out of --json");
    assert!(v.get("timestamp").is_none());
}

#[test]
fn rys_k_max_validation() {
    let out = run(&["rys", "--n", "2", "--q", "3", "--k-max", "all"]);
    assert_eq!(out.status.code(), Some(2), "ALL needs q^(n^2) <= 16");
    let out = run(&["rys", "--n", "2", "--q", "2", "--k-max", "zero"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rank_command() {
    let out = run(&["rank", "--p", "11", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["rank"], 10);
    let out = run(&["rank", "--p", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "lemma", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));

    let out = run(&["verify", "lemma", "--q", "7"]);
    assert_eq!(out.status.code(), Some(2), "over the exhaustion cap");

    let out = run(&["verify", "corollary", "--q", "2", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["counterexamples"], serde_json::json!([]));
    assert_eq!(v["degenerate_cases"], 6);
}

#[test]
fn field_command_shows_modulus_and_table() {
    let out = run(&["field", "--p", "2", "--e", "2", "--show-table", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["q"], 4);
    assert_eq!(v["modulus"], serde_json::json!([1, 1, 1]));
    // x * x = x + 1 shows up as table[2][2] = 3.
    assert_eq!(v["mul_table"][2][2], 3);

    let out = run(&["field", "--q", "9", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["p"], 3);
    assert_eq!(v["e"], 2);
    assert_eq!(v["modulus"], serde_json::json!([1, 0, 1]));

    let out = run(&["field", "--q", "6"]);
    assert_eq!(out.status.code(), Some(2), "6 is not a prime power");
}

#[test]
fn catalog_appends_schema_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.jsonl");
    let pathstr = path.to_str().unwrap();

    let out = run(&["rys", "--n", "2", "--q", "2", "--k-max", "all", "--catalog", pathstr]);
    assert!(out.status.success());
    let out = run(&["verify", "lemma", "--q", "2", "--catalog", pathstr]);
    assert!(out.status.success());

    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "one record per command, appended");
    for (line, kind) in lines.iter().zip(["rys", "verify"]) {
        let v: serde_json::Value = serde_json::from_str(line).expect("catalog line is JSON");
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["kind"], kind);
        assert_eq!(v["q"], 2);
        assert_eq!(v["n"], 2);
        assert!(v["elapsed_ms"].is_u64());
        assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
        let ts = v["timestamp"].as_str().unwrap();
        assert!(ts.ends_with('Z') && ts.contains('T'), "RFC 3339 UTC: {ts}");
        assert!(v["payload"].is_object());
    }
}

#[test]
fn catalog_env_var_default() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env-catalog.jsonl");
    let out = mortal()
        .args(["shortest", "--q", "2", "--gen", "0,0;0,0"])
        .env("MORTAL_CATALOG", &path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(v["kind"], "shortest");
    assert_eq!(v["payload"]["shortest_length"], 1);
}

#[test]
fn version_names_catalog_schema() {
    let out = run(&["--version"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("catalog schema 1"), "{text}");
}

#[test]
fn threads_flag_does_not_change_output() {
    let mut outputs = Vec::new();
    for t in ["1", "4"] {
        let out = run(&["verify", "corollary", "--q", "3", "--threads", t, "--json"]);
        outputs.push(stdout_json(&out));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn checkpoint_file_is_created_and_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("rys.ckpt");
    let args = [
        "rys", "--n", "2", "--q", "2", "--k-max", "3", "--orbits",
        "--checkpoint", ckpt.to_str().unwrap(), "--json",
    ];
    let first = stdout_json(&run(&args));
    assert!(Path::new(&ckpt).exists());
    let second = stdout_json(&run(&args));
    assert_eq!(first, second, "resume over a completed checkpoint is a no-op");
}
