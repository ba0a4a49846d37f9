use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ddphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddphase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ddphase-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn same_seed_gives_identical_csvs() {
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|tag| {
            let dir = scratch(tag);
            let out = ddphase(&[
                "scan",
                "--config",
                "V",
                "--grow",
                "g3",
                "--grid",
                "15",
                "--seed",
                "11",
                "--threads",
                "1",
                "--out",
                dir.to_str().unwrap(),
            ]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            let files = csvs(&dir);
            assert!(dir.join("manifest.json").exists() && dir.join("separatrix.json").exists());
            std::fs::remove_dir_all(&dir).ok();
            files
        })
        .collect();
    assert_eq!(runs[0].len(), 5);
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn manifest_records_invocation() {
    let dir = scratch("manifest");
    let out = ddphase(&[
        "two-level",
        "--g",
        "0.5",
        "--x",
        "0:2:0.01",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["invocation"]["command"], "two-level");
    assert_eq!(manifest["invocation"]["g"], 0.5);
    assert_eq!(manifest["seed"], 0);
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((result["x_c"].as_f64().unwrap() - 1.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(result["transition"]["kind"], "second_order");
    let rows = std::fs::read_to_string(dir.join("two_level.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(rows, 202);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validation_errors_exit_two() {
    let dir = scratch("bad");
    let out = ddphase(&["scan", "--grow", "g9", "--grid", "5", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = ddphase(&["oracle", "--config", "no_such_config", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn selftest_and_oracle_succeed() {
    let dir = scratch("ok");
    let out = ddphase(&["selftest", "--levels", "3", "--na", "3", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let out = ddphase(&[
        "oracle",
        "--config",
        "two_level",
        "--grow",
        "g0",
        "--at",
        "1.5",
        "--na",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(result["gap"].as_f64().unwrap() >= -1e-10);
    assert_eq!(result["converged"], true);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn model_file_is_accepted() {
    let dir = scratch("file");
    std::fs::create_dir_all(&dir).unwrap();
    let model = dir.join("model.json");
    std::fs::write(
        &model,
        r#"{
  "atoms": {"levels": [0.0, 1.0]},
  "modes": [1.0],
  "couplings": [{"transition": [1, 2], "mode": 1, "mu": 0.0}],
  "gtable": {"entries": [{"index": [1, 2, 1, 2], "value": 0.25}]}
}"#,
    )
    .unwrap();
    let out = ddphase(&[
        "oracle",
        "--config",
        model.to_str().unwrap(),
        "--axes",
        "1-2",
        "--at",
        "1.0",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::remove_dir_all(&dir).ok();
}
