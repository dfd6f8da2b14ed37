use bhcube::harness::write_json;
use bhcube::{BalancedHypercube, Edge, HamPath, Instance, Sign, Vertex};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bhcube(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhcube")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_solve_check_round_trip() {
    let inst = scratch("rt-inst.json");
    let path = scratch("rt-path.json");
    let out = bhcube(&["gen", "--n", "3", "--budget-split", "2,2", "--seed", "7", "--out", s(&inst)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = bhcube(&["solve", "--in", s(&inst), "--out", s(&path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&bhcube(&["check", "--in", s(&inst), "--path", s(&path)])), 0);

    let parsed: Instance = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!((parsed.faults().len(), parsed.forest().len()), (2, 2));
    let p: HamPath = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(p.vertices().len(), 64);
}

#[test]
fn a_reversed_path_still_checks_and_a_broken_one_does_not() {
    let inst = scratch("chk-inst.json");
    let path = scratch("chk-path.json");
    bhcube(&["gen", "--n", "2", "--seed", "3", "--out", s(&inst)]);
    assert_eq!(code(&bhcube(&["oracle", "--in", s(&inst), "--out", s(&path)])), 0);
    let mut p: Vec<String> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    p.reverse();
    std::fs::write(&path, serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(code(&bhcube(&["check", "--in", s(&inst), "--path", s(&path)])), 0);
    p.pop();
    std::fs::write(&path, serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(code(&bhcube(&["check", "--in", s(&inst), "--path", s(&path)])), 1);
}

#[test]
fn oracle_reports_the_infeasible_bh1_instance() {
    let out = bhcube(&["oracle", "--in", &fixture("infeasible-bh1.json")]);
    assert_eq!(code(&out), 1);
}

#[test]
fn malformed_input_names_line_and_column() {
    let out = bhcube(&["solve", "--in", &fixture("bad-label.json")]);
    assert_ne!(code(&out), 0);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3 column"), "{err}");

    let missing = scratch("missing-field.json");
    std::fs::write(&missing, "{\n  \"n\": 2,\n  \"faults\": []\n}\n").unwrap();
    let out = bhcube(&["solve", "--in", s(&missing)]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("prescribed") && err.contains("line 4"), "{err}");
}

#[test]
fn unsupported_instances_exit_2() {
    // Two faulty edges cross the only admissible splitting dimension.
    let h = BalancedHypercube::new(4).unwrap();
    let x: Vertex = "0000".parse().unwrap();
    let faults: Vec<Edge> = [(3, Sign::Plus), (3, Sign::Minus), (0, Sign::Plus), (1, Sign::Plus), (2, Sign::Plus)]
        .into_iter()
        .map(|(j, s)| Edge::new(x, h.neighbor(x, j, s).unwrap()).unwrap())
        .collect();
    let y: Vertex = "2222".parse().unwrap();
    let forest = vec![Edge::new(y, h.neighbor(y, 2, Sign::Minus).unwrap()).unwrap()];
    let inst = bhcube::validate_instance(4, faults, forest, "0200".parse().unwrap(), "1130".parse().unwrap()).unwrap();
    let file = scratch("unsupported.json");
    write_json(&file, &inst).unwrap();
    assert_eq!(code(&bhcube(&["solve", "--in", s(&file)])), 2);
}

#[test]
fn exhausted_node_budget_exits_3() {
    let inst = scratch("budget-inst.json");
    bhcube(&["gen", "--n", "2", "--seed", "1", "--out", s(&inst)]);
    assert_eq!(code(&bhcube(&["--node-budget", "2", "oracle", "--in", s(&inst)])), 3);
}

#[test]
fn certify_exit_codes() {
    assert_eq!(code(&bhcube(&["certify", "--n", "1", "--k", "0"])), 0);
    let out = bhcube(&["--json", "certify", "--n", "1", "--k", "1"]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!report["failures"].as_array().unwrap().is_empty());
}

#[test]
fn compare_and_bench_run() {
    let out = bhcube(&["--json", "compare", "--n", "2", "--count", "100", "--budget", "2", "--seed", "42"]);
    assert_eq!(code(&out), 0);
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["successes"], 100);
    assert_eq!(code(&bhcube(&["bench", "--n", "3", "--count", "5"])), 0);
}
