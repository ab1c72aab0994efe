use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn projrk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projrk"))
        .args(args)
        .env_remove("PROJRK_PRECISION_BITS")
        .output()
        .unwrap()
}

fn with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_projrk"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn tableau_then_analyze() {
    let tab = projrk(&["tableau", "--construction", "midpoint", "--scheme", "leapfrog2"]);
    assert!(tab.status.success());
    let report = with_stdin(&["analyze", "--tableau", "-", "--max-order", "6"], &tab.stdout);
    assert!(report.status.success(), "{}", String::from_utf8_lossy(&report.stderr));
    let v = json(&report);
    let text = v.to_string();
    assert!(text.contains("\"manifest\""));
    assert_eq!(v["classical_order"], 2);
    assert_eq!(v["pseudosymplectic_order"], 5);
    assert_eq!(v["pseudosymmetry_order"], 5);
}

#[test]
fn tableau_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("projrk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mono.json");
    let p = path.to_str().unwrap();
    let out = projrk(&["-o", p, "tableau", "--construction", "monoimplicit", "--alphas", "1/5,1/2,3/10"]);
    assert!(out.status.success());
    let v = json(&projrk(&["analyze", "--tableau", p, "--max-order", "4"]));
    assert_eq!(v["symplectic"], true);
    assert_eq!(v["stages"], 7);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tree_counts() {
    let out = projrk(&["trees", "--max", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("manifest"));
    let counts: Vec<u64> = lines
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["count"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, [1, 1, 2, 4, 9, 20]);
}

#[test]
fn integrate_emits_csv_with_manifest() {
    let out = projrk(&["integrate", "--problem", "harmonic", "--h", "0.1", "--steps", "10", "--stride", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# manifest: "));
    assert!(lines[1].starts_with("t,"));
    assert_eq!(lines.len(), 2 + 3);
}

#[test]
fn exit_codes() {
    assert_eq!(projrk(&["tableau", "--construction", "nonsense"]).status.code(), Some(2));
    assert_eq!(projrk(&["tableau", "--construction", "midpoint", "--alphas", "1/2,1/3"]).status.code(), Some(2));
    let no_conv = projrk(&[
        "integrate", "--method", "monoimplicit", "--problem", "nonseparable", "--h", "0.5", "--steps", "2",
        "--max-iter", "1",
    ]);
    assert_eq!(no_conv.status.code(), Some(3));
    let perturbed = projrk(&["verify-paper", "--skip-numeric", "--perturb", "1/1000"]);
    assert_eq!(perturbed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&perturbed.stderr).contains("check failed"));
}

#[test]
fn precision_from_environment() {
    let run = |bits: &str| {
        Command::new(env!("CARGO_BIN_EXE_projrk"))
            .args(["integrate", "--problem", "harmonic", "--h", "0.1", "--steps", "2"])
            .env("PROJRK_PRECISION_BITS", bits)
            .output()
            .unwrap()
    };
    assert_eq!(run("5").status.code(), Some(2));
    let ok = run("128");
    assert!(ok.status.success());
    let header = String::from_utf8(ok.stdout).unwrap();
    let manifest: Value = serde_json::from_str(header.lines().next().unwrap().trim_start_matches("# manifest: ")).unwrap();
    assert_eq!(manifest["precision_bits"], 128);
    assert_eq!(manifest["backend"], "mpfr");
}

#[test]
fn exact_verification_passes() {
    let out = projrk(&["verify-paper", "--skip-numeric"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["passed"], true);
}
