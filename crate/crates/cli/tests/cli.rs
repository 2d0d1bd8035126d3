use std::path::Path;
use std::process::{Command, Output};

fn immwit(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_immwit")).args(args).env("IMMWIT_THREADS", threads).output().expect("run immwit")
}

fn read(p: &Path) -> String {
    String::from_utf8(std::fs::read(p).unwrap()).expect("UTF-8 output")
}

#[test]
fn table1_is_reproducible_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("t{i}.csv"));
        let trials = dir.path().join(format!("trials{i}.csv"));
        let args = ["table1", "--d", "3", "--n", "120", "--seed", "5", "--out", out.to_str().unwrap(), "--trials", trials.to_str().unwrap()];
        assert!(immwit(&args, threads).status.success());
        outputs.push((read(&out), read(&trials)));
    }
    assert_eq!(outputs[0], outputs[1]);
    // counts are integer sums, so the thread count does not matter either
    assert_eq!(outputs[0], outputs[2]);
    let csv = &outputs[0].0;
    assert!(csv.starts_with("schema_version,experiment,d,n,seed,criterion,detected,rate\n"));
    assert_eq!(csv.lines().count(), 7);
    assert_eq!(outputs[0].1.lines().count(), 1 + 120 * 6);
}

#[test]
fn seed_changes_the_sample() {
    let run = |seed: &str| String::from_utf8(immwit(&["multicopy", "--n", "80", "--seed", seed], "1").stdout).unwrap();
    assert_eq!(run("1"), run("1"));
    assert_ne!(run("1"), run("2"));
}

#[test]
fn json_report_echoes_config() {
    let out = immwit(&["multicopy", "--n", "20", "--seed", "3", "--format", "json"], "1");
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["experiment"], "multicopy");
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
}

#[test]
fn young_dump_has_nested_complex_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("young.json");
    assert!(immwit(&["young", "--k", "2", "--d", "3", "--dump", path.to_str().unwrap()], "1").status.success());
    let v: serde_json::Value = serde_json::from_str(&read(&path)).unwrap();
    let ps = v["projectors"].as_array().unwrap();
    assert_eq!(ps.len(), 2);
    assert_eq!(ps[0]["partition"], "[2]");
    let m = ps[1]["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 9);
    assert_eq!(m[0].as_array().unwrap()[0].as_array().unwrap().len(), 2);
}

#[test]
fn simplex_csv_layout() {
    let out = immwit(&["simplex", "--resolution", "3", "--n", "10", "--seed", "1"], "1");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("schema_version,u,v,a,b,c,rate"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn obs3_succeeds_with_certificate() {
    let out = immwit(&["obs3", "--samples", "20"], "1");
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["certificate"]["detected"], true);
    assert_eq!(v["certificate"]["dims"], serde_json::json!([3, 3, 3, 3]));
}

#[test]
fn bad_arguments_fail_cleanly() {
    let out = immwit(&["table1", "--d", "9", "--n", "5"], "1");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));
    let out = immwit(&["simplex", "--resolution", "1"], "1");
    assert_eq!(out.status.code(), Some(1));
    let out = immwit(&["young", "--k", "9", "--d", "2"], "1");
    assert!(!out.status.success());
}
