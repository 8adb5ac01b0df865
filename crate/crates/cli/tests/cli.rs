use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tourney_core::io::{read_path, write_text};
use tourney_core::{generate, GeneratorSpec};

fn tourney(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tourney"))
        .args(args)
        .env_remove("TOURNEY_PROFILE")
        .output()
        .unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], 1);
    doc["records"].as_array().unwrap().clone()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn oracle_dp_on_transitive() {
    let r = records(&tourney(&["run", "--algo", "oracle-dp", "--gen", "transitive", "--n", "10"]));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["cost"], 0);
    assert_eq!(r[0]["oracle_cost"], 0);
    assert_eq!(r[0]["identity_ok"], true);
}

#[test]
fn indegree_on_three_cycle() {
    let r = records(&tourney(&["run", "--algo", "indegree", "--gen", "cycle", "--n", "3"]));
    assert_eq!(r[0]["cost"], 1);
    assert_eq!(r[0]["passes"], 1);
    assert_eq!(r[0]["phase_breakdown"]["indegree"]["passes"], 1);
}

#[test]
fn ptas_repeat_meets_the_ratio() {
    let out = tourney(&[
        "run", "--algo", "ptas", "--gen", "planted", "--q", "0.2", "--n", "18", "--epsilon", "0.4", "--passes",
        "2", "--repeat", "100",
    ]);
    let r = records(&out);
    assert_eq!(r.len(), 100);
    let seeds: Vec<u64> = r.iter().map(|x| x["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, (0..100).collect::<Vec<_>>());
    let good = r.iter().filter(|x| x["ratio"].as_f64().is_some_and(|q| q <= 1.4)).count();
    assert!(good >= 90, "{good}/100");
    assert!(r.iter().all(|x| x["attribution_check"] == true));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = tourney(&[
            "run", "--algo", "ptas", "--gen", "uniform", "--n", "40", "--repeat", "6", "--seed", "9", "--format",
            "csv", "--stream-order", "shuffle:3", "--out", path_str(p),
        ]);
        assert!(out.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("schema=1"));
    assert!(lines.next().unwrap().starts_with("seed,algo,n,cost,oracle_cost,ratio,passes,peak_words"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn hampath_and_scc_records() {
    for algo in ["hampath", "scc"] {
        let r = records(&tourney(&["run", "--algo", algo, "--gen", "uniform", "--n", "200", "--repeat", "3"]));
        for x in &r {
            assert_eq!(x["identity_ok"], true);
            assert!(x["redo_count"].is_u64());
        }
    }
    let r = records(&tourney(&["run", "--algo", "scc", "--gen", "cycle", "--n", "30"]));
    assert_eq!(r[0]["details"]["strongly_connected"], true);
}

#[test]
fn gen_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for (args, spec) in [
        (vec!["--gen", "transitive", "--n", "5"], GeneratorSpec::transitive(5)),
        (vec!["--gen", "planted", "--q", "0.3", "--n", "100", "--seed", "4"], GeneratorSpec::planted(100, 0.3, 4)),
    ] {
        let expected = generate(&spec).unwrap();
        for format in ["text", "binary"] {
            let path = dir.path().join(format!("t-{}.{format}", spec.n));
            let mut cmd = vec!["gen", "--format", format, "--out", path_str(&path)];
            cmd.extend(&args);
            assert!(tourney(&cmd).status.success());
            assert!(read_path(&path).unwrap().tournament == expected);
            if format == "text" {
                let mut bytes = Vec::new();
                write_text(&expected, &mut bytes).unwrap();
                assert_eq!(std::fs::read(&path).unwrap(), bytes);
            }
        }
    }
}

#[test]
fn run_reads_generated_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    assert!(tourney(&["gen", "--gen", "cycle", "--n", "3", "--out", path_str(&path)]).status.success());
    let r = records(&tourney(&["run", "--algo", "indegree", "--input", path_str(&path)]));
    assert_eq!(r[0]["cost"], 1);
}

#[test]
fn duplicate_pair_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.txt");
    std::fs::write(&path, "n 3\n0 1\n1 2\n2 1\n0 2\n").unwrap();
    let out = tourney(&["run", "--algo", "indegree", "--input", path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| tourney(args).status.code();
    assert_eq!(code(&["run", "--algo", "indegree", "--gen", "cycle", "--n", "3"]), Some(0));
    assert_eq!(code(&["run", "--algo", "indegree", "--gen", "planted", "--q", "0.9", "--n", "5"]), Some(2));
    assert_eq!(code(&["run", "--algo", "ptas", "--gen", "uniform", "--n", "5", "--epsilon", "1.5"]), Some(2));
    assert_eq!(code(&["run", "--algo", "ptas", "--gen", "uniform", "--n", "5", "--repeat", "0"]), Some(2));
    assert_eq!(code(&["run", "--algo", "ptas", "--gen", "uniform", "--n", "5", "--stream-order", "zig"]), Some(2));
    assert_eq!(code(&["run", "--algo", "nope", "--gen", "uniform", "--n", "5"]), Some(2));
    assert_eq!(code(&["run", "--algo", "oracle-dp", "--gen", "uniform", "--n", "21"]), Some(4));
    assert_eq!(code(&["run", "--algo", "oracle-brute", "--gen", "uniform", "--n", "10"]), Some(4));
}

#[test]
fn env_profile_overrides_the_flag() {
    let base = ["run", "--algo", "ptas", "--gen", "uniform", "--n", "12", "--profile", "desk"];
    let spec = |out: Output| -> Value {
        assert!(out.status.success());
        serde_json::from_slice::<Value>(&out.stdout).unwrap()["spec"]["profile"]["name"].clone()
    };
    assert_eq!(spec(tourney(&base)), "desk");
    let out = Command::new(env!("CARGO_BIN_EXE_tourney")).args(base).env("TOURNEY_PROFILE", "theory").output().unwrap();
    assert_eq!(spec(out), "theory");
    let bad = Command::new(env!("CARGO_BIN_EXE_tourney")).args(base).env("TOURNEY_PROFILE", "fast").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn config_file_overrides_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ptas.cfg");
    std::fs::write(&cfg, "# tuned\nc_i = 4\npasses = 3\n").unwrap();
    let out = tourney(&["run", "--algo", "ptas", "--gen", "uniform", "--n", "12", "--config", path_str(&cfg)]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["spec"]["passes"], 3);
    assert_eq!(doc["spec"]["profile"]["c_i"], 4.0);
    let out = tourney(&[
        "run", "--algo", "ptas", "--gen", "uniform", "--n", "12", "--config", path_str(&cfg), "--passes", "1",
    ]);
    assert_eq!(serde_json::from_slice::<Value>(&out.stdout).unwrap()["spec"]["passes"], 1);
}
