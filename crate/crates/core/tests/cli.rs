use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_noma-wsr"));
    c.env_remove("NOMA_WSR_SEED");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("noma-wsr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn generate(path: &Path, k: &str, n: &str, m: &str, seed: &str) {
    let out = run(bin().args(["generate", "--K", k, "--N", n, "--M", m, "--seed", seed, "--out"]).arg(path));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_is_deterministic() {
    let a = scratch("det-a.json");
    let b = scratch("det-b.json");
    generate(&a, "6", "3", "2", "17");
    generate(&b, "6", "3", "2", "17");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let first = run(bin().args(["solve", "--instance"]).arg(&a));
    let second = run(bin().args(["solve", "--instance"]).arg(&a));
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let report = json(&first);
    for field in ["wsr", "user_rates", "powers", "ops", "iterations", "converged"] {
        assert!(report.get(field).is_some(), "missing {field}");
    }
}

#[test]
fn seed_from_environment() {
    let a = scratch("env-a.json");
    let b = scratch("env-b.json");
    generate(&a, "3", "2", "2", "99");
    let out = run(bin()
        .env("NOMA_WSR_SEED", "99")
        .args(["generate", "--K", "3", "--N", "2", "--M", "2", "--out"])
        .arg(&b));
    assert!(out.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn oma_flag_serves_one_user_per_subcarrier() {
    let path = scratch("oma.json");
    generate(&path, "5", "3", "3", "4");
    let out = run(bin().args(["solve", "--M", "1", "--instance"]).arg(&path));
    assert_eq!(out.status.code(), Some(0));
    let p = &json(&out)["powers"]["p"];
    for n in 0..3 {
        let active = (0..5).filter(|&k| p[k][n].as_f64().unwrap() > 0.0).count();
        assert!(active <= 1);
    }
}

#[test]
fn oracle_flag_reports_gap() {
    let path = scratch("oracle.json");
    generate(&path, "5", "3", "2", "8");
    let out = run(bin().args(["solve", "--oracle", "--instance"]).arg(&path));
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let oracle = &report["oracle"];
    let wsr = report["wsr"].as_f64().unwrap();
    let best = oracle["wsr"].as_f64().unwrap();
    assert!((oracle["gap"].as_f64().unwrap() - (best - wsr)).abs() <= 1e-6 * best);
    assert!(wsr <= best * (1.0 + 1e-6));
}

#[test]
fn trace_file_is_written() {
    let path = scratch("trace-inst.json");
    let trace = scratch("trace.csv");
    generate(&path, "4", "3", "2", "3");
    let out = run(bin().args(["solve", "--solver", "mcpc", "--instance"]).arg(&path).arg("--trace").arg(&trace));
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.lines().count() >= 2);
}

#[test]
fn malformed_instance_names_field() {
    let path = scratch("bad.json");
    let good = scratch("good.json");
    generate(&good, "3", "2", "2", "1");
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(&good).unwrap()).unwrap();
    v["weights"][1] = serde_json::json!(-1.0);
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(bin().args(["solve", "--instance"]).arg(&path));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weights"));
}

#[test]
fn bad_flags_exit_with_input_error() {
    let out = run(bin().args(["solve", "--instance", "x.json", "--solver", "nope"]));
    assert_eq!(out.status.code(), Some(1));
    let out = run(bin().args(["experiment", "wsr-vs-k", "--K", "0", "--out"]).arg(scratch("never.csv")));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn experiment_writes_csv_with_header() {
    let out_path = scratch("exp.csv");
    let out = run(bin()
        .args(["experiment", "pf-frame", "--K", "4", "--M", "2", "--seeds", "2", "--N", "3", "--jobs", "1", "--out"])
        .arg(&out_path));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# spec:")));
    assert!(text.lines().any(|l| l == "solver,K,M,metric,n,mean,ci95,failed,not_converged"));
    let dir = out_path.parent().unwrap();
    let siblings: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("exp"))
        .collect();
    assert!(siblings.len() >= 3, "{siblings:?}");
}
