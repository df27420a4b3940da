//! Golden-file tests for every command. Regenerate with `UPDATE_GOLDEN=1`.

use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn lpsi(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lpsi"))
        .args(args)
        .current_dir(root())
        .env_remove("LPSI_THREADS")
        .output()
        .expect("spawn lpsi");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn golden(name: &str, actual: &str) {
    let path = root().join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

fn check(name: &str, args: &[&str], code: i32) -> String {
    let (got, stdout, stderr) = lpsi(args);
    assert_eq!(got, code, "exit code of {args:?}; stderr: {stderr}");
    golden(name, &stdout);
    stdout
}

#[test]
fn solve1d_exact() {
    let out = check("solve1d_zigzag.json", &["solve1d", "--data", "tests/data/zigzag.csv", "--p", "0.5"], 0);
    assert!(out.contains("\"l0\": 2"));
    assert!(out.contains("2.8284271247461903"));
}

#[test]
fn solve1d_float() {
    check("solve1d_zigzag_float.json", &["solve1d", "--data", "tests/data/zigzag.csv", "--p", "0.5", "--float"], 0);
}

#[test]
fn solve1d_records_input_order() {
    let out = check("solve1d_unsorted.json", &["solve1d", "--data", "tests/data/zigzag_unsorted.csv", "--p", "0.5"], 0);
    assert!(out.contains("input_order"));
}

#[test]
fn solve1d_json_input() {
    check("solve1d_pstar6_json.json", &["solve1d", "--data", "tests/data/pstar6.json", "--p", "0.1"], 0);
}

#[test]
fn pstar() {
    let out = check("pstar_pstar6.json", &["pstar", "--data", "tests/data/pstar6.csv"], 0);
    assert!(out.contains("\"value\": 0.200"));
}

#[test]
fn pstar_coarse_grid() {
    check("pstar_pstar6_grid16.json", &["pstar", "--data", "tests/data/pstar6.csv", "--pstar-grid", "16"], 0);
}

#[test]
fn l0() {
    check("l0_pstar6.json", &["l0", "--data", "tests/data/pstar6.csv"], 0);
}

#[test]
fn solve_nd_exact() {
    let out = check("solve_nd_peak.json", &["solve-nd", "--data", "tests/data/peak.csv", "--p", "0.5"], 0);
    assert!(out.contains("\"l0\": 3"));
}

#[test]
fn solve_nd_options() {
    check(
        "solve_nd_peak_options.json",
        &[
            "solve-nd",
            "--data",
            "tests/data/peak.csv",
            "--p",
            "0.3",
            "--R",
            "5",
            "--patterns",
            "realizable",
            "--support-cap",
            "3",
            "--no-bias-penalty",
        ],
        0,
    );
}

#[test]
fn solve_nd_irl1() {
    check(
        "solve_nd_peak_irl1.json",
        &["solve-nd", "--data", "tests/data/peak.csv", "--p", "0.5", "--method", "irl1", "--seed", "3"],
        0,
    );
}

#[test]
fn oracle_grid() {
    check(
        "oracle_grid.json",
        &["oracle", "--data", "tests/data/zigzag.csv", "--p", "0.5", "--kind", "grid", "--seed", "0"],
        0,
    );
}

#[test]
fn oracle_restart() {
    check(
        "oracle_restart.json",
        &[
            "oracle",
            "--data",
            "tests/data/zigzag.csv",
            "--p",
            "0.5",
            "--kind",
            "restart",
            "--seed",
            "11",
            "--restarts",
            "10",
        ],
        0,
    );
}

#[test]
fn oracle_partition() {
    check(
        "oracle_partition.json",
        &["oracle", "--data", "tests/data/pstar6.csv", "--kind", "partition", "--seed", "0"],
        0,
    );
}

#[test]
fn train() {
    check(
        "train_zigzag.json",
        &["train", "--data", "tests/data/zigzag.csv", "--config", "tests/data/train.json", "--seed", "5"],
        0,
    );
}

#[test]
fn train_multivariate() {
    check(
        "train_xor.json",
        &["train", "--data", "tests/data/xor.json", "--config", "tests/data/train.json", "--seed", "5"],
        0,
    );
}

#[test]
fn verify_accepts_solver_output() {
    check(
        "verify_zigzag.json",
        &["verify", "--data", "tests/data/zigzag.csv", "--result", "tests/golden/solve1d_zigzag.json"],
        0,
    );
}

#[test]
fn verify_accepts_lifted_output() {
    check(
        "verify_peak.json",
        &["verify", "--data", "tests/data/peak.csv", "--result", "tests/golden/solve_nd_peak.json"],
        0,
    );
}

#[test]
fn verify_rejects_tampered_result() {
    let out = check(
        "verify_tampered.json",
        &["verify", "--data", "tests/data/zigzag.csv", "--result", "tests/data/zigzag_tampered.json"],
        2,
    );
    assert!(out.contains("\"passed\": false"));
}

#[test]
fn plot_univariate() {
    let out = check(
        "plot_zigzag.csv",
        &["plot", "--result", "tests/golden/solve1d_zigzag.json", "--range", "-1", "4", "--samples", "6"],
        0,
    );
    assert!(out.contains("1.0000000000000000,1.0000000000000000\n"));
}

#[test]
fn plot_network() {
    check(
        "plot_peak.csv",
        &["plot", "--result", "tests/golden/solve_nd_peak.json", "--range", "-2", "2", "--samples", "5"],
        0,
    );
}

#[test]
fn plot_grid() {
    let out = check(
        "plot_xor.csv",
        &["plot", "--result", "tests/golden/train_xor.json", "--range", "0", "1", "--samples", "3"],
        0,
    );
    assert_eq!(out.lines().count(), 10);
}

#[test]
fn duplicate_abscissa_is_a_validation_error() {
    let (code, stdout, stderr) = lpsi(&["solve1d", "--data", "tests/data/duplicate.csv", "--p", "0.5"]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(stderr.contains("rows 1 and 3"), "{stderr}");
}

#[test]
fn bad_p_is_a_validation_error() {
    assert_eq!(lpsi(&["solve1d", "--data", "tests/data/zigzag.csv", "--p", "1.5"]).0, 2);
}

#[test]
fn support_cap_is_a_resource_error() {
    let (code, _, stderr) = lpsi(&["solve-nd", "--data", "tests/data/peak.csv", "--p", "0.5", "--support-cap", "2"]);
    assert_eq!(code, 3);
    assert!(stderr.contains("lower bound = 3"), "{stderr}");
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(lpsi(&["solve1d", "--data", "tests/data/zigzag.csv", "--p", "0.5", "--bogus"]).0, 64);
    assert_eq!(lpsi(&["frobnicate"]).0, 64);
    assert_eq!(lpsi(&["oracle", "--data", "tests/data/zigzag.csv", "--p", "0.5", "--kind", "restart"]).0, 64);
    assert_eq!(lpsi(&["solve1d", "--data", "tests/data/zigzag.csv", "--p", "0.5", "--exact", "--float"]).0, 64);
    assert_eq!(lpsi(&["--help"]).0, 0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, stdout, _) = lpsi(&["l0", "--data", "tests/data/zigzag.csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(lpsi::io::ResultDocument::from_json(&text).unwrap().to_json().unwrap(), text);
}

#[test]
fn timing_is_opt_in() {
    let (_, plain, _) = lpsi(&["l0", "--data", "tests/data/zigzag.csv"]);
    assert!(!plain.contains("wall_time_s"));
    let (_, timed, _) = lpsi(&["l0", "--data", "tests/data/zigzag.csv", "--timing"]);
    assert!(timed.contains("wall_time_s"));
}

#[test]
fn every_golden_document_roundtrips() {
    for entry in std::fs::read_dir(root().join("tests/golden")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = lpsi::io::ResultDocument::read(Path::new(&path)).unwrap();
        assert_eq!(doc.to_json().unwrap(), text, "{}", path.display());
    }
}
