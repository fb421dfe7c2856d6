use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3pic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_prints_one_line_per_n() {
    let o = run(&["count", "--surface", "s3", "--n", "1..3", "--strategy", "naive"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 16\n2 94\n3 730\n");
    let o = run(&["--format", "records", "count", "--surface", "x2", "--n", "1,2"]);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["count"], "29");
    assert_eq!(lines[1]["strategy"], "p4");
}

#[test]
fn rank_and_zeta_from_fixtures() {
    let o = run(&["rank", "--surface", "x3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x3: geometric Picard rank upper bound 2\n");
    let o = run(&["zeta", "--surface", "s3"]);
    let text = stdout(&o);
    assert!(text.contains("c_2 = 1/3"));
    assert!(text.contains("rank upper bound: 2"));
}

#[test]
fn smooth_reports_and_exit_codes() {
    let o = run(&["smooth", "--surface", "x2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x2: smooth of dimension 2\n");
    let o = run(&["smooth", "--surface", "s3-singular"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lift_prints_the_surface_and_checks() {
    let o = run(&["lift", "--target", "degree6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("name=lift6\n"));
    assert!(text.contains("# mod 2 -> x2: ok"));
    assert!(text.contains("# mod 3 -> x3: ok"));
}

#[test]
fn verify_all_without_audit_has_no_conclusion() {
    let o = run(&["--format", "records", "verify-all", "--target", "degree10", "--skip-audit"]);
    assert_eq!(o.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(json["conclusion"].is_null());
    assert!(json["blocking"].as_array().unwrap().iter().any(|b| b == "audit-s2"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["count", "--surface", "s3", "--n", "11"][..],
        &["count", "--surface", "nope"],
        &["count", "--surface", "x2", "--strategy", "slice"],
        &["lift", "--target", "degree7"],
        &["audit", "--surface", "x2"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = run(&["count", "--surface", "nope"]);
    let err: serde_json::Value = serde_json::from_str(String::from_utf8(o.stderr).unwrap().trim()).unwrap();
    assert_eq!(err["error"], "usage");
}

#[test]
fn budget_overruns_exit_with_three() {
    let o = run(&["--budget", "1000", "count", "--surface", "s3", "--n", "2", "--strategy", "naive"]);
    assert_eq!(o.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_str(String::from_utf8(o.stderr).unwrap().trim()).unwrap();
    assert_eq!(err["error"], "budget_exceeded");
}

#[test]
fn output_file_and_thread_override() {
    let path = std::env::temp_dir().join(format!("k3pic-cli-test-{}.txt", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_k3pic"))
        .env("K3PIC_THREADS", "2")
        .args(["--out", path.to_str().unwrap(), "count", "--surface", "x3", "--n", "1..2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "1 15\n2 95\n");
    std::fs::remove_file(path).unwrap();
}
