//! End-to-end checks of the command-line interface and its exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contract-menus"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn gen_validate_solve_verify_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    let out = run(&["gen", "--fixture", "no-maximum", "--out", "fixture.json"], dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&["validate", "fixture.json"], dir);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid"));

    let out = run(
        &["solve-rand", "fixture.json", "--epsilon", "0.05", "--trace", "trace.csv", "--simplify"],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("value = 0.7"), "unexpected output: {stdout}");
    assert!(dir.join("fixture.rand-menu.json").exists());
    let trace = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iter,primal,dual,new_columns"));

    let out = run(&["verify", "fixture.json", "fixture.rand-menu.json"], dir);
    assert_eq!(code(&out), 0, "solver-emitted menus verify clean");

    let out = run(&["solve-det", "fixture.json"], dir);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("(2/3)"));

    let out = run(&["verify", "fixture.json", "fixture.menu.json"], dir);
    assert_eq!(code(&out), 0);
}

#[test]
fn ptas_mode_runs_from_the_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run(&["gen", "--random", "2", "3", "2", "--seed", "8", "--out", "inst.json"], dir);
    let out = run(
        &["solve-det", "inst.json", "--mode", "ptas", "--delta", "1/4", "--out", "menu.json"],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["verify", "inst.json", "menu.json"], dir);
    assert_eq!(code(&out), 0);

    // ptas without --delta is a usage problem.
    let out = run(&["solve-det", "inst.json", "--mode", "ptas"], dir);
    assert_eq!(code(&out), 2);
}

#[test]
fn dimension_errors_exit_with_invalid_input() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run(&["gen", "--fixture", "no-maximum", "--out", "fixture.json"], dir);
    let out = run(&["solve-det", "fixture.json", "--mode", "two-outcomes"], dir);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 outcomes"));
}

#[test]
fn invalid_instances_exit_with_invalid_input() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(
        dir.join("broken.json"),
        r#"{
            "types": ["t"], "actions": ["a"], "outcomes": ["w"],
            "mu": {"t": 1},
            "dist": {"t/a": [0.9]},
            "cost": {"t/a": 0},
            "reward": {"w": 1}
        }"#,
    )
    .unwrap();
    let out = run(&["validate", "broken.json"], dir);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("not stochastic"));

    // Usage errors also land on exit code 2 (clap's default).
    let out = run(&["solve-rand", "missing-flag.json"], dir);
    assert_eq!(code(&out), 2);
}

#[test]
fn failed_verification_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run(&["gen", "--random", "2", "2", "2", "--seed", "5", "--out", "inst.json"], dir);
    // A menu paying type t1 strictly more on every outcome tempts t0.
    std::fs::write(
        dir.join("menu.json"),
        r#"{"entries": {"t0": [0, 0], "t1": ["1/2", "1/2"]}}"#,
    )
    .unwrap();
    let out = run(&["verify", "inst.json", "menu.json"], dir);
    assert_eq!(code(&out), 1);
}

#[test]
fn gen_then_validate_for_parameter_samples() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for (i, dims) in [["1", "2", "2"], ["3", "2", "3"], ["2", "4", "2"]].iter().enumerate() {
        let name = format!("r{i}.json");
        let out = run(
            &["gen", "--random", dims[0], dims[1], dims[2], "--seed", "9", "--out", &name],
            dir,
        );
        assert_eq!(code(&out), 0);
        let out = run(&["validate", &name], dir);
        assert_eq!(code(&out), 0);
    }

    std::fs::write(
        dir.join("c5.json"),
        r#"{"vertices": 5, "edges": [[1,2],[2,3],[3,4],[4,5],[5,1]], "independent_set": [1,3]}"#,
    )
    .unwrap();
    let out = run(
        &[
            "gen", "--hardness", "c5.json", "--alpha", "1/2", "--out", "hard.json",
            "--witness-out", "witness.json",
        ],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["validate", "hard.json"], dir);
    assert_eq!(code(&out), 0);
    let out = run(&["verify", "hard.json", "witness.json"], dir);
    assert_eq!(code(&out), 0, "witness menu is DSIC at this scale");
}

#[test]
fn bench_reports_randomized_above_deterministic_on_the_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run(&["gen", "--fixture", "no-maximum", "--out", "fixture.json"], dir);
    run(&["gen", "--random", "2", "2", "2", "--seed", "3", "--out", "small.json"], dir);

    let out = run(&["bench", ".", "--out", "report.json"], dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let fixture_row = rows
        .iter()
        .find(|r| r["instance"] == "fixture.json")
        .expect("fixture row present");
    assert!(fixture_row["error"].is_null());
    let det = fixture_row["det_value"].as_f64().unwrap();
    let rand = fixture_row["rand_value_e01"].as_f64().unwrap();
    assert!(rand > det, "randomized {rand} should beat deterministic {det}");
    assert!(fixture_row["sup_ub"].as_f64().unwrap() <= 0.7501);
}

#[test]
fn bench_of_empty_directory_is_an_empty_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = run(&["bench", ".", "--out", "report.json"], dir);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 0);
}
