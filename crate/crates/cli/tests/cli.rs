use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsp6-verify"))
        .args(args)
        .env_remove("GSP6_PRECISION")
        .env_remove("GSP6_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn spin_factor_at_trivial_parameters() {
    let out = run(&["report-spin", "--satake", "1,1,1,1", "--rmax", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1 + 8*q + 36*q^2 + 120*q^3");
}

#[test]
fn spin_factor_accepts_fractions() {
    let out = run(&["report-spin", "--satake", "1/2,1,1,1", "--rmax", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1 + 4*q");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["report-spin"][..],
        &["report-spin", "--satake", "1,0,1,1"],
        &["report-spin", "--satake", "1,1,1"],
        &["check-suite", "--suite", "modulus", "--p", "4", "--disc", "5"],
        &["check-suite", "--suite", "modulus", "--p", "2", "--disc", "5"],
        &["check-suite", "--suite", "modulus", "--p", "3", "--disc", "6"],
        &["check-suite", "--suite", "nonsense", "--p", "3", "--disc", "5"],
        &["verify-main", "--p", "5", "--disc", "10"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn modulus_suite_passes() {
    let out = run(&["check-suite", "--suite", "modulus", "--p", "3", "--disc", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["command"], "check-suite");
    assert_eq!(v["config"]["suite"], "modulus");
    assert!(v["checks"][0]["cases"].as_u64().unwrap() > 0);
}

#[test]
fn negative_discriminant_is_accepted() {
    let out = run(&["check-suite", "--suite", "alphachi", "--p", "5", "--disc", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["D"], -1);
}

#[test]
fn reports_are_byte_stable() {
    let args = ["check-suite", "--suite", "admissible", "--p", "3", "--disc", "13", "--amax", "1"];
    let a = run(&args);
    let b = run(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let path = std::env::temp_dir().join(format!("gsp6-report-{}.json", std::process::id()));
    let c = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, a.stdout);
}

#[test]
fn timings_are_opt_in() {
    let args = ["check-suite", "--suite", "alphachi", "--p", "3", "--disc", "5"];
    let plain = json(&run(&args));
    assert!(plain["checks"][0].get("wall_ms").is_none());
    let timed = json(&run(&[&args[..], &["--timings"]].concat()));
    assert!(timed["checks"][0]["wall_ms"].is_u64());
}

#[test]
fn main_identity_report() {
    let out = run(&["verify-main", "--p", "3", "--disc", "5", "--rmax", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["config"]["Rmax"], 2);
    assert_eq!(v["config"]["case"], "inert");
    assert!(v["payload"].is_object());
}
