mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture;

fn exposome(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exposome"))
        .args(args)
        .current_dir(cwd)
        .env_remove("EXPOSOME_TABLES")
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .unwrap()
}

fn scratch(files: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for f in files {
        std::fs::copy(fixture(f), dir.path().join(f)).unwrap();
    }
    let tables = dir.path().join("tables");
    std::fs::create_dir(&tables).unwrap();
    for entry in std::fs::read_dir(fixture("tables")).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, tables.join(p.file_name().unwrap())).unwrap();
    }
    dir
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn build_summary() {
    let dir = scratch(&["dedupe_12.csv"]);
    let v = json(&exposome(&["build", "dedupe_12.csv"], dir.path()));
    assert_eq!((v["W"].as_u64(), v["V"].as_u64(), v["L"].as_u64()), (Some(12), Some(7), Some(10)));
    assert_eq!(v["manifest"]["parameters"]["key_mode"], "cortege");
    let strict = json(&exposome(&["build", "dedupe_12.csv", "--key-mode", "strict", "--d", "2"], dir.path()));
    assert_eq!(strict["V"], 9);
    assert_eq!(strict["D"], 2);
}

#[test]
fn rejects_go_to_sidecar() {
    let dir = scratch(&["malformed_10.csv"]);
    let out = exposome(&["build", "malformed_10.csv"], dir.path());
    assert_eq!(json(&out)["records"], 8);
    let side = std::fs::read_to_string(dir.path().join("malformed_10.csv.rejects")).unwrap();
    assert_eq!(side.lines().count(), 3);
}

#[test]
fn module_errors_exit_nonzero_with_error_line() {
    let dir = scratch(&["temporal_77.csv", "nhl_style.csv"]);
    let out = exposome(&["diff", "temporal_77.csv", "--t1", "2007", "--t2", "2006"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: BadCutoffs: "), "{err}");

    let out = exposome(&["project", "nhl_style.csv", "--axis", "exposure", "--codes", "X"], dir.path());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: UnknownAxis: "));
    assert!(!out.status.success());

    let out = exposome(&["build", "missing.csv"], dir.path());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: IoFailure: "));

    let out = exposome(&["build", "nhl_style.csv", "--d", "0"], dir.path());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: InvalidParams: "));

    let out = exposome(&["cliques", "nhl_style.csv", "--max-cliques", "2"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: OutputCapExceeded: "));
    let partial: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(partial["truncated"], true);
    assert_eq!(partial["cliques"].as_array().unwrap().len(), 2);
}

#[test]
fn diff_counts() {
    let dir = scratch(&["temporal_77.csv"]);
    let v = json(&exposome(&["diff", "temporal_77.csv", "--t1", "2006", "--t2", "2007"], dir.path()));
    assert_eq!(v["new_node_count"], 10);
    assert_eq!(v["incremented_count"], 5);
}

#[test]
fn tables_from_environment() {
    let dir = scratch(&["nhl_style.csv"]);
    let out = Command::new(env!("CARGO_BIN_EXE_exposome"))
        .args(["groups", "nhl_style.csv"])
        .current_dir(dir.path())
        .env("EXPOSOME_TABLES", "tables")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["groups"][0]["label"], "Benzene");
    assert_eq!(v["manifest"]["inputs"].as_array().unwrap().len(), 5);
}

#[test]
fn aggregation_flag_merges_codes() {
    let dir = scratch(&["synthetic_30.csv"]);
    let fine = json(&exposome(&["build", "synthetic_30.csv"], dir.path()));
    let coarse = json(&exposome(&["build", "synthetic_30.csv", "--agg-exposure", "1"], dir.path()));
    assert!(coarse["L"].as_u64() >= fine["L"].as_u64());
    assert_eq!(coarse["manifest"]["parameters"]["agg_levels"]["exposure"], 1);
}

#[test]
fn synthetic_input_from_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = exposome(&["build", "--seed", "5", "--records", "200", "--write-records", "gen.csv"], dir.path());
    let v = json(&a);
    assert_eq!(v["records"], 200);
    assert_eq!(v["manifest"]["parameters"]["seed"], 5);
    let again = json(&exposome(&["build", "gen.csv"], dir.path()));
    assert_eq!(again["L"], v["L"]);
}

#[test]
fn every_format_is_byte_identical_across_runs() {
    let dir = scratch(&["nhl_style.csv"]);
    for format in ["graphml", "dot", "report", "newick"] {
        let args = ["export", "nhl_style.csv", "--tables", "tables", "--format", format];
        let a = exposome(&args, dir.path());
        let b = exposome(&args, dir.path());
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
}
