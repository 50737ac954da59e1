use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qudo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qudo")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const QUICK: &[&str] = &["--restarts", "2", "--max-iters", "15"];

fn with_quick<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend_from_slice(QUICK);
    v
}

#[test]
fn run_prints_csv_with_fixed_columns() {
    let o = qudo(&with_quick(&["run", "--problem", "tsp", "--n", "3", "--depth", "1", "--depth", "2"]));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("p,N,K,D,V,encoding,ar_mean"));
    assert!(lines.iter().all(|l| l.split(',').count() == 18));
}

#[test]
fn run_json_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.json");
    let o = qudo(&with_quick(&[
        "run",
        "--problem",
        "max-k-cut",
        "--n",
        "5",
        "--k",
        "2",
        "--depth",
        "1",
        "--encoding",
        "qudo",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["encoding"], "qudo");
    assert_eq!(rows[0]["pvalid_mean"], 1.0);
}

#[test]
fn sweep_builds_grid_and_is_reproducible() {
    let args = with_quick(&[
        "sweep",
        "--problem",
        "coloring",
        "--n",
        "5",
        "--n",
        "6",
        "--k",
        "3",
        "--depth",
        "1",
        "--encoding",
        "qudo",
        "--seed",
        "4",
    ]);
    let a = qudo(&args);
    let b = qudo(&args);
    assert_eq!(a.status.code(), Some(0));
    let strip = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .map(|l| l.split(',').take(15).chain(l.split(',').skip(17)).collect::<Vec<_>>().join(","))
            .collect()
    };
    assert_eq!(strip(&a).len(), 3);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn config_file_drives_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(
        &path,
        r#"[{"problem": "scheduling", "n": 3, "encoding": "qudo", "depths": [1]},
            {"problem": "tsp", "n": 3, "encoding": "qubo", "depths": [1]}]"#,
    )
    .unwrap();
    let o = qudo(&with_quick(&["sweep", "--config", path.to_str().unwrap()]));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains("qudo") && lines[2].contains("qubo"));
}

#[test]
fn invalid_input_exits_with_two() {
    assert_eq!(qudo(&["run", "--problem", "knapsack", "--n", "3"]).status.code(), Some(2));
    assert_eq!(qudo(&["run", "--n", "3"]).status.code(), Some(2));
    assert_eq!(qudo(&["run", "--problem", "tsp", "--n", "3", "--depth", "0"]).status.code(), Some(2));
    assert_eq!(qudo(&["run", "--problem", "tsp", "--n", "3", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(
        qudo(&["encode", "--problem", "coloring", "--n", "4", "--k", "5"]).status.code(),
        Some(2)
    );
    // clap's own usage errors share the code
    assert_eq!(qudo(&["run", "--bogus"]).status.code(), Some(2));
}

#[test]
fn oversized_instances_exit_with_three() {
    // 10! permutations exceed the exhaustive oracle's cap
    let o = qudo(&with_quick(&["run", "--problem", "tsp", "--n", "10", "--depth", "1"]));
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    // the exact solver reports the same limit
    assert_eq!(qudo(&["exact", "--problem", "tsp", "--n", "10"]).status.code(), Some(3));
}

#[test]
fn encode_reports_models_and_resources() {
    let o = qudo(&["encode", "--problem", "tsp", "--n", "3", "--encoding", "both", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["resources"]["qubo_vars"], 9);
    assert_eq!(v["resources"]["qudo_sites"], 3);
    assert_eq!(v["models"].as_array().unwrap().len(), 2);
    assert_eq!(v["models"][0]["encoding"], "qubo");
    assert_eq!(v["models"][1]["encoding"], "qudo");
    assert!(v["penalties"]["a"].as_f64().unwrap() > 0.0);
}

#[test]
fn exact_lists_optimizers_of_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    let o = qudo(&["encode", "--problem", "scheduling", "--n", "3", "--seed", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    fs::write(&path, v["instance"].to_string()).unwrap();

    let o = qudo(&["exact", "--instance", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let e: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(e["sense"], "min");
    assert!(e["num_optimizers"].as_u64().unwrap() >= 1);
    assert!(e["optimizers"][0]["structure"]["order"].is_array());
    assert_eq!(e["instance"], v["instance"]);
}
