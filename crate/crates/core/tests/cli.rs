use std::path::Path;
use std::process::{Command, Output};

use constrained_qaoa::graph::{Graph, ProblemInstance, ProblemKind};
use constrained_qaoa::harness::{read_records, ExperimentConfig, RECORDS_FILE, SUMMARY_FILE};
use constrained_qaoa::qaoa::Variant;

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qaoa-bench"))
        .args(args)
        .env_remove("QAOA_BENCH_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn k4(dir: &Path) -> String {
    let path = dir.join("k4.json");
    ProblemInstance::new(Graph::complete(4).unwrap(), ProblemKind::DensestSubgraph, 2)
        .unwrap()
        .save(&path)
        .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn k4_has_ratio_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = k4(dir.path());
    let o = bench(&["run", "--instance", &inst, "--variant", "Clique-Obj", "--p", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["approx_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn zero_rounds_gives_dicke_expectation() {
    let o = bench(&["run", "--n", "6", "--k", "3", "--seed", "4", "--variant", "Ring-Obj", "--p", "0", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["p"], 0);
    assert_eq!(v["per_round_ratios"].as_array().unwrap().len(), 1);
}

#[test]
fn threshold_variant_without_threshold_is_a_usage_error() {
    let o = bench(&["run", "--n", "6", "--k", "3", "--variant", "Grover-Th", "--p", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--threshold"), "{}", stderr(&o));
}

#[test]
fn oversized_subspace_exits_with_capacity_code() {
    let o = bench(&["run", "--n", "40", "--k", "20", "--variant", "Clique-Obj", "--p", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn unknown_variant_is_rejected() {
    let o = bench(&["run", "--n", "6", "--k", "3", "--variant", "Star-Obj", "--p", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tune_writes_schedule_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tuned.json");
    let o = bench(&[
        "tune", "--n", "6", "--k", "3", "--seed", "2", "--variant", "Grover-Th", "--p-max", "3", "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["rounds"].as_array().unwrap().len(), 4);
    assert_eq!(v["seed"], 2);
    assert_eq!(v["tuner_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn validate_passes_and_catches_injected_fault() {
    let ok = bench(&["validate", "--n", "4,6", "--draws", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("oracle-agreement"));
    let bad = bench(&["validate", "--n", "4,6", "--draws", "3", "--inject-fault", "flip-mixer-sign"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL"));
}

#[test]
fn experiment_is_resumable_and_fit_checks_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    let out_s = out.to_str().unwrap();
    let args = [
        "experiment", "--n", "4", "--variant", "Grover-Th", "--target", "0.95", "--seed", "5", "--jobs", "1",
        "--out-dir", out_s,
    ];
    let first = bench(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert!(stdout(&first).contains("64 records (64 computed, 0 reused)"), "{}", stdout(&first));
    let records = read_records(&out.join(RECORDS_FILE)).unwrap();
    assert_eq!(records.len(), 64);
    assert!(records.iter().any(|r| r.c_max == 0));

    let second = bench(&args);
    assert!(stdout(&second).contains("64 records (0 computed, 64 reused)"), "{}", stdout(&second));
    assert_eq!(read_records(&out.join(RECORDS_FILE)).unwrap(), records);

    let mut other = ExperimentConfig::new(vec![ProblemKind::DensestSubgraph], vec![4], vec![Variant::GROVER_TH], 6);
    other.targets = vec![0.95];
    let cfg_path = dir.path().join("other.json");
    std::fs::write(&cfg_path, serde_json::to_string(&other).unwrap()).unwrap();
    let summary = out.join(SUMMARY_FILE);
    let fit = bench(&[
        "fit", "--summary", summary.to_str().unwrap(), "--variant", "Grover-Th", "--target", "0.95", "--config",
        cfg_path.to_str().unwrap(),
    ]);
    assert_eq!(fit.status.code(), Some(2));
    assert!(stderr(&fit).contains("config"), "{}", stderr(&fit));

    let clash = bench(&[
        "experiment", "--n", "4", "--variant", "Grover-Th", "--target", "0.95", "--seed", "6", "--out-dir", out_s,
    ]);
    assert_eq!(clash.status.code(), Some(2));
}

#[test]
fn gen_instances_writes_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["gen-instances", "--n", "6", "--instances", "3", "--seed", "1", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let count = std::fs::read_dir(dir.path().join("instances")).unwrap().count();
    assert_eq!(count, 3);
}
